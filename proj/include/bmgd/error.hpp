#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bmgd {

// Base class for everything thrown by this library. The CLI maps subtypes
// to process exit codes, so new error kinds should extend one of the
// categories below rather than std::exception directly.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad caller input: mismatched shapes, domain violations, invalid modes.
struct InvalidArgumentError : Error {
    using Error::Error;
};

// Config-file / CLI-level problems (unknown keys, missing values, bad types).
struct ConfigError : Error {
    using Error::Error;
};

// Malformed or truncated dataset files. `offset` is the byte position at
// which the reader gave up, so corrupt files can be inspected directly.
struct FormatError : Error {
    FormatError(const std::string& what, std::uint64_t offset_)
        : Error(what + " (byte offset " + std::to_string(offset_) + ")"), offset(offset_) {}
    std::uint64_t offset;
};

struct IoError : Error {
    using Error::Error;
};

// Matrix factorization failed structurally (not SPD, symmetry violated, ...).
struct FactorizationError : Error {
    using Error::Error;
};

// Numerically singular system; carries the 1-norm condition estimate that
// triggered the refusal (may be +inf when a pivot vanished exactly).
struct SingularSystemError : Error {
    SingularSystemError(const std::string& what, double condition_estimate_)
        : Error(what), condition_estimate(condition_estimate_) {}
    double condition_estimate;
};

// Rank-deficient moment matrix where a positive-definite one was required.
struct RankError : Error {
    using Error::Error;
};

// An iterative method ran out of iterations. Carries the best estimate so
// far so callers can decide whether "not fully converged" is good enough.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double best_estimate_)
        : Error(what), best_estimate(best_estimate_) {}
    double best_estimate;
};

// Optimization iterates left the finite range. `last_finite` is the most
// recent parameter vector that was still representable.
struct DivergenceError : Error {
    DivergenceError(const std::string& what, std::vector<double> last_finite_)
        : Error(what), last_finite(std::move(last_finite_)) {}
    std::vector<double> last_finite;
};

// Logistic MLE walked off to infinity: the data are (quasi-)separated.
struct SeparationError : Error {
    using Error::Error;
};

// A finite schedule was asked for a rate beyond its last stage.
struct ScheduleExhaustedError : Error {
    using Error::Error;
};

}  // namespace bmgd
