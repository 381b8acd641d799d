#pragma once

#include <stdexcept>
#include <string>

namespace maser {

/// Bad configuration: dimension mismatch, out-of-range hyperparameter, unknown key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was invoked in a state where it is not allowed.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A NaN or Inf reached a loss, gradient or parameter.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace maser
