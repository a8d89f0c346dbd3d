#pragma once

#include <stdexcept>
#include <string>

namespace ghost {

enum class ErrorKind {
    InvalidInput,
    DegenerateGeometry,
    SamplingViolation,
    GridMismatch,
    ImagingEquationUnsatisfied,
    EmptyRegion,
    IoFailure,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string branch = {})
        : std::runtime_error(what), kind_(kind), branch_(std::move(branch)) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Non-empty when the failure belongs to one branch of a dual-source evaluation.
    const std::string& branch() const noexcept { return branch_; }

private:
    ErrorKind kind_;
    std::string branch_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ghost
