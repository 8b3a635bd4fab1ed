#pragma once

#include <stdexcept>
#include <string>

namespace jsqldp
{

/// Input violated a documented precondition (bad parameters, malformed files).
class ValidationError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// A run was aborted at runtime, e.g. a queue grew past the configured level cap.
class RuntimeAbort : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace jsqldp
