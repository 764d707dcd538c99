#pragma once

#include <stdexcept>
#include <string>

namespace bethe3 {

enum class ErrorKind {
    SingularArgument,
    ConstraintViolation,
    NoConvergence,
    DegenerateMomenta,
    BoundsViolation,
    Inconsistency,
    SeedFailure,
    InvalidArgument,
    NotApplicable,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::SingularArgument: return "singular-argument";
    case ErrorKind::ConstraintViolation: return "constraint-violation";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::DegenerateMomenta: return "degenerate-momenta";
    case ErrorKind::BoundsViolation: return "bounds-violation";
    case ErrorKind::Inconsistency: return "inconsistency";
    case ErrorKind::SeedFailure: return "seed-failure";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NotApplicable: return "not-applicable";
    }
    return "unknown";
}

/** @brief Every failure raised by the library carries a kind so callers can map it to exit codes. */
class SolverError : public std::runtime_error {
public:
    SolverError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace bethe3
