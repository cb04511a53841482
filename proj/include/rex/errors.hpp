#pragma once

#include <stdexcept>
#include <string>

namespace rex {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value (policy parameters, benchmark settings, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Sampler called with parameters outside its domain.
struct DomainError : Error {
    using Error::Error;
};

/// A specification checker threw while evaluating a conjunct.
struct EvaluationError : Error {
    using Error::Error;
};

/// Specification (or pass vector) is structurally invalid.
struct InvalidSpecificationError : Error {
    using Error::Error;
};

/// Attempted to sample a counterexample from a program that has none.
struct CannotRefineSolvedError : Error {
    using Error::Error;
};

/// A prompt template referenced a placeholder with no value.
struct TemplateError : Error {
    TemplateError(const std::string& msg, std::string field_name)
        : Error(msg), field(std::move(field_name)) {}
    std::string field;
};

/// HTTP request could not be completed (retries exhausted, timeouts).
struct TransportError : Error {
    using Error::Error;
};

/// HTTP response arrived but did not follow the expected wire format.
struct ProtocolError : Error {
    using Error::Error;
};

/// Speedup requested between methods with no commonly solved problems.
struct UndefinedSpeedupError : Error {
    using Error::Error;
};

} // namespace rex
