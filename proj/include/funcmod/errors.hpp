#pragma once

#include <stdexcept>
#include <string>

namespace funcmod {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidData : Error { using Error::Error; };
struct InvalidSplit : Error { using Error::Error; };
struct InvalidContext : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct ModeViolation : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct SelectionFailure : Error { using Error::Error; };
struct MockParseFailure : Error { using Error::Error; };
struct KernelParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

struct DivergenceError : Error {
    explicit DivergenceError(const std::string& msg, size_t epoch_)
        : Error(msg), epoch(epoch_) {}
    size_t epoch;
};

// Endpoint client failures.
struct LlmError : Error { using Error::Error; };
struct TimeoutError : LlmError { using LlmError::LlmError; };
struct RateLimitedError : LlmError { using LlmError::LlmError; };
struct AuthFailure : LlmError { using LlmError::LlmError; };
struct MalformedResponse : LlmError { using LlmError::LlmError; };

} // namespace funcmod
