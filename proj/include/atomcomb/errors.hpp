#pragma once

#include <stdexcept>
#include <string>

namespace atomcomb {

/// Machine-readable error codes. Sweep rows and the CLI error report carry
/// these alongside the human-readable message.
enum class ErrorCode {
    none = 0,
    domain,             // argument outside the documented domain
    empty_spectrum,     // cutoff admits no modes
    no_solution,        // root bracket does not contain a sign change
    pole,               // Bose occupation evaluated at or beyond a pole
    convergence,        // iteration budget exhausted
    branch,             // logarithm branch undefined (root at origin)
    insufficient_data,  // fewer inputs than the operation requires
    arity,              // container length mismatch
    scaling,            // exponent magnitude would overflow
    degenerate_range,   // auto-binning over identical values
    config,             // bad configuration file or flags
    io,                 // file system failure
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::none: return "none";
        case ErrorCode::domain: return "domain";
        case ErrorCode::empty_spectrum: return "empty_spectrum";
        case ErrorCode::no_solution: return "no_solution";
        case ErrorCode::pole: return "pole";
        case ErrorCode::convergence: return "convergence";
        case ErrorCode::branch: return "branch";
        case ErrorCode::insufficient_data: return "insufficient_data";
        case ErrorCode::arity: return "arity";
        case ErrorCode::scaling: return "scaling";
        case ErrorCode::degenerate_range: return "degenerate_range";
        case ErrorCode::config: return "config";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};
struct EmptySpectrumError : Error {
    explicit EmptySpectrumError(const std::string& what) : Error(ErrorCode::empty_spectrum, what) {}
};
struct NoSolutionError : Error {
    explicit NoSolutionError(const std::string& what) : Error(ErrorCode::no_solution, what) {}
};
struct PoleError : Error {
    explicit PoleError(const std::string& what) : Error(ErrorCode::pole, what) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& what) : Error(ErrorCode::convergence, what) {}
};
struct BranchError : Error {
    explicit BranchError(const std::string& what) : Error(ErrorCode::branch, what) {}
};
struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& what) : Error(ErrorCode::insufficient_data, what) {}
};
struct ArityError : Error {
    explicit ArityError(const std::string& what) : Error(ErrorCode::arity, what) {}
};
struct ScalingError : Error {
    explicit ScalingError(const std::string& what) : Error(ErrorCode::scaling, what) {}
};
struct DegenerateRangeError : Error {
    explicit DegenerateRangeError(const std::string& what) : Error(ErrorCode::degenerate_range, what) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace atomcomb
