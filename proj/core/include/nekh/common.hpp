#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nekh {

/// Real vectors (actions, angles, frequencies) and integer vectors (Fourier
/// modes, multi-indices, lattice vectors).
using Vec = std::vector<double>;
using IntVec = std::vector<std::int64_t>;

/// Hard cap on the number of degrees of freedom.  Fourier-Taylor keys are
/// stored in fixed-width arrays of this size.
inline constexpr int kMaxDims = 6;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/** Base class for every error raised by the library. */
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument outside the domain where an operation is defined
/// (out-of-ball action, non-positive radius, empty resonant surface...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Singular geometry: vanishing gradient or non-invertible Hessian.
class SingularError : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed; carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Vec last_iterate)
        : Error(what), last_iterate_(std::move(last_iterate)) {}
    const Vec& last_iterate() const noexcept { return last_iterate_; }

private:
    Vec last_iterate_;
};

/// A smallness or precondition inequality was violated.  `condition` names
/// the inequality, `lhs`/`rhs` are its two sides (lhs <= rhs was required).
class ConditionError : public Error {
public:
    ConditionError(std::string condition, double lhs, double rhs);
    const std::string& condition() const noexcept { return condition_; }
    double lhs() const noexcept { return lhs_; }
    double rhs() const noexcept { return rhs_; }
    double margin() const noexcept { return rhs_ - lhs_; }

private:
    std::string condition_;
    double lhs_;
    double rhs_;
};

/// Truncated Lie series dropped more than the configured threshold.
class TruncationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

inline ConditionError::ConditionError(std::string condition, double lhs, double rhs)
    : Error(condition + " violated: " + std::to_string(lhs) + " > " + std::to_string(rhs)),
      condition_(std::move(condition)), lhs_(lhs), rhs_(rhs) {}

double sup_norm(std::span<const double> v);
double euclidean_norm(std::span<const double> v);
std::int64_t gcd_all(std::span<const std::int64_t> v);

}  // namespace nekh
