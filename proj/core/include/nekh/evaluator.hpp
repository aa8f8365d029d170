#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nekh/algebra.hpp"

namespace nekh {

/** Flattened form of a real FTPolynomial for repeated evaluation of the value
    and the full gradient.  Only one half of each conjugate pair is kept (with
    weight 2).  Immutable; scratch space lives in a caller-owned Workspace so
    one evaluator can be shared across threads. */
class HamiltonianEvaluator {
public:
    struct Workspace {
        std::vector<std::complex<double>> phases;  // n x (2K+1)
        std::vector<double> powers;                // n x (D+1)
    };

    explicit HamiltonianEvaluator(const FTPolynomial& p);

    int dims() const noexcept { return n_; }
    const Vec& center() const noexcept { return center_; }
    Workspace make_workspace() const;

    double value(std::span<const double> theta, std::span<const double> action, Workspace& ws) const;

    /// Returns the value and fills d/dtheta and d/dI.
    double gradient(std::span<const double> theta, std::span<const double> action, std::span<double> d_theta,
                    std::span<double> d_action, Workspace& ws) const;

    /// Convenience overloads with a private workspace.
    double value(std::span<const double> theta, std::span<const double> action) const;

private:
    void fill_tables(std::span<const double> theta, std::span<const double> action, Workspace& ws) const;

    struct Term {
        std::complex<double> c;  // weighted coefficient
        std::array<std::int16_t, kMaxDims> k;
        std::array<std::int16_t, kMaxDims> alpha;
    };

    int n_;
    int max_mode_;
    int max_degree_;
    Vec center_;
    std::vector<Term> terms_;
};

}  // namespace nekh
