#pragma once

#include <stdexcept>
#include <string>

namespace mcascade {

/// Coarse error category; the CLI maps each one to a process exit code.
enum class ErrorKind {
    Config,      // malformed input, bad parameters, out-of-domain arguments
    Assumption,  // model fails (A0)-(A2) or is outside an operation's scope
    Numeric,     // no root, degenerate regression, divergent moments
    Resource,    // memory budget exceeded
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& code, const std::string& what)
        : std::runtime_error(what), kind_(kind), code_(code) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Short machine-readable tag, e.g. "no-root".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::Config, "domain", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, "config", what) {}
};

struct ScopeError : Error {
    explicit ScopeError(const std::string& what) : Error(ErrorKind::Assumption, "scope", what) {}
};

struct AssumptionError : Error {
    explicit AssumptionError(const std::string& what)
        : Error(ErrorKind::Assumption, "assumption", what) {}
};

struct NoRootError : Error {
    explicit NoRootError(const std::string& what) : Error(ErrorKind::Numeric, "no-root", what) {}
};

struct DivergenceError : Error {
    explicit DivergenceError(const std::string& what)
        : Error(ErrorKind::Numeric, "divergence", what) {}
};

struct DegenerateRangeError : Error {
    explicit DegenerateRangeError(const std::string& what)
        : Error(ErrorKind::Numeric, "degenerate-range", what) {}
};

struct ZeroOscillationError : Error {
    explicit ZeroOscillationError(const std::string& what)
        : Error(ErrorKind::Numeric, "zero-oscillation", what) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& what)
        : Error(ErrorKind::Resource, "memory-budget", what) {}
};

}  // namespace mcascade
