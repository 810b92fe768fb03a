#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct SizeError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

// Raised when a checked invariant fails; the message carries the witness.
struct InvariantViolation : Error {
    using Error::Error;
};

} // namespace mixlab
