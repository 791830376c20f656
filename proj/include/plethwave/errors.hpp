#pragma once

#include <stdexcept>
#include <string>

namespace plethwave {

enum class ErrorKind {
    config,
    shape,
    degenerate_signal,
    insufficient_fiducials,
    domain,
    input,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return "configuration error";
        case ErrorKind::shape: return "shape error";
        case ErrorKind::degenerate_signal: return "degenerate signal";
        case ErrorKind::insufficient_fiducials: return "insufficient fiducials";
        case ErrorKind::domain: return "domain error";
        case ErrorKind::input: return "input error";
    }
    return "error";
}

/// Base of every error raised by the library. `kind()` lets callers (the CLI
/// in particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& what) : Error(ErrorKind::shape, what) {}
};
struct DegenerateSignalError : Error {
    explicit DegenerateSignalError(const std::string& what)
        : Error(ErrorKind::degenerate_signal, what) {}
};
struct InsufficientFiducialsError : Error {
    explicit InsufficientFiducialsError(const std::string& what)
        : Error(ErrorKind::insufficient_fiducials, what) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};
struct InputError : Error {
    explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

}  // namespace plethwave
