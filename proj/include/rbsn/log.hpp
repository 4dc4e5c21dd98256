#pragma once

#include <functional>
#include <string>

namespace rbsn {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs the sink for non-fatal diagnostics. The default writes to stderr.
/// Passing an empty handler silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace rbsn
