#pragma once

#include <stdexcept>
#include <string>

namespace devcarbon {

/// Broad failure classes. Each maps onto one CLI exit code.
enum class ErrorKind {
    usage,   // bad flags, missing inputs, invalid configuration
    data,    // malformed or inconsistent input data, domain violations
    remote,  // HTTP / service failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Invalid constants or profile values.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// A numeric precondition was violated (negative duration, fraction outside [0,1], ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class RemoteError : public Error {
public:
    explicit RemoteError(const std::string& what) : Error(ErrorKind::remote, what) {}
};

class NotFoundError : public RemoteError {
public:
    explicit NotFoundError(const std::string& what) : RemoteError(what) {}
};

/// Transient transport failure; callers may retry.
class TransportError : public RemoteError {
public:
    explicit TransportError(const std::string& what) : RemoteError(what) {}
};

inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::usage: return 1;
    case ErrorKind::data: return 2;
    case ErrorKind::remote: return 3;
    }
    return 2;
}

}  // namespace devcarbon
