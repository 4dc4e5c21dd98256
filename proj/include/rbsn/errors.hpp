#pragma once

#include <stdexcept>

namespace rbsn {

/// Tessellation could not be built from the given input.
class GenerationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Assembly or linear solve failed.
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user configuration or arguments.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rbsn
