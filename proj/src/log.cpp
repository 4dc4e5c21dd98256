#include "rbsn/log.hpp"

#include <iostream>
#include <mutex>

namespace rbsn {

namespace {

std::mutex sink_mutex;
WarningHandler sink = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(sink_mutex);
    std::swap(sink, handler);
    return handler;
}

void warn(const std::string& message)
{
    std::lock_guard lock(sink_mutex);
    if (sink)
        sink(message);
}

}  // namespace rbsn
