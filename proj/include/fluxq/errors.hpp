#pragma once

#include <stdexcept>
#include <string>

namespace fluxq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A user-supplied parameter is out of its admissible range or non-finite.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An API precondition was violated by the caller (e.g. unvalidated field).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A computed quantity broke an invariant it must satisfy by construction.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class UnsupportedFieldError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fluxq
