#pragma once

#include <stdexcept>
#include <string>

namespace lz {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// An argument lies outside the domain where an operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

// Gamma-function pole hit (argument is a nonpositive integer).
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
    const char* kind() const noexcept override { return "pole_error"; }
};

class StepLimitExceeded : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "step_limit_exceeded"; }
};

class ToleranceFailure : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "tolerance_failure"; }
};

// Cancellation in a power series exceeded the accepted relative level.
class AccuracyLoss : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "accuracy_loss"; }
};

class InsufficientOscillations : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "insufficient_oscillations"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io_error"; }
};

}  // namespace lz
