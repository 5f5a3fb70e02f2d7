#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace redraft {

/// Error classes surfaced to callers, the trajectory, and CLI exit codes.
enum class ErrorKind {
    config,
    precondition,
    transport,
    rate_limit,
    malformed_response,
    parse,
    validation,
    halted,
    internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Workflow path of the leaf that raised the error, empty outside a workflow.
    const std::string& node_path() const noexcept { return node_path_; }
    void set_node_path(std::string path) { node_path_ = std::move(path); }

private:
    ErrorKind kind_;
    std::string node_path_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(ErrorKind::config, message) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& message)
        : Error(ErrorKind::precondition, message) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::validation, message) {}
};

/// Malformed input record or judge output. `subject` names the offending field or tag.
class ParseError : public Error {
public:
    ParseError(std::string subject, const std::string& message)
        : Error(ErrorKind::parse, message), subject_(std::move(subject)) {}

    const std::string& subject() const noexcept { return subject_; }

private:
    std::string subject_;
};

class BackendError : public Error {
public:
    BackendError(ErrorKind kind, const std::string& message, bool retryable)
        : Error(kind, message), retryable_(retryable) {}

    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

class TransportError : public BackendError {
public:
    explicit TransportError(const std::string& message, bool retryable = true)
        : BackendError(ErrorKind::transport, message, retryable) {}
};

class RateLimitError : public BackendError {
public:
    explicit RateLimitError(const std::string& message)
        : BackendError(ErrorKind::rate_limit, message, true) {}
};

class MalformedResponseError : public BackendError {
public:
    explicit MalformedResponseError(const std::string& message)
        : BackendError(ErrorKind::malformed_response, message, false) {}
};

/// Raised by the run hook that stops a research run after a committed step.
class HaltRequested : public Error {
public:
    explicit HaltRequested(int step)
        : Error(ErrorKind::halted, "run halted after step " + std::to_string(step)), step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::transport: return "transport";
    case ErrorKind::rate_limit: return "rate_limit";
    case ErrorKind::malformed_response: return "malformed_response";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::halted: return "halted";
    case ErrorKind::internal: return "internal";
    }
    return "internal";
}

} // namespace redraft
