#pragma once

#include <stdexcept>
#include <string>

namespace mhd1d {

/// Input failed a structural or range check. Message names the offending
/// field/key and, where applicable, the node index.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tridiagonal elimination hit a zero (or effectively zero) pivot.
struct LinearSolveError : std::runtime_error {
    explicit LinearSolveError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A custom conductivity returned a value below the kappa1*theta^q floor.
struct ConstitutiveViolation : std::runtime_error {
    explicit ConstitutiveViolation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two records/states that must share mesh and times do not.
struct AlignmentError : std::runtime_error {
    explicit AlignmentError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Log-log least squares rejected its input (E <= 0 or too few points).
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mhd1d
