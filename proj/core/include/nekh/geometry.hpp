#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nekh/algebra.hpp"

namespace nekh {

/** Integrable part h(I) on the ball B_R (sup norm) around h.center(), with
    the optional constants of the boundedness condition |h|_{C^k} < M and the
    quasi-convexity margin m. */
class IntegrableModel {
public:
    IntegrableModel(FTPolynomial h, double radius, std::optional<double> bound_M = std::nullopt,
                    std::optional<double> margin_m = std::nullopt);

    const FTPolynomial& h() const noexcept { return h_; }
    int dims() const noexcept { return h_.dims(); }
    double radius() const noexcept { return radius_; }
    std::optional<double> bound_M() const noexcept { return bound_M_; }
    std::optional<double> margin_m() const noexcept { return margin_m_; }
    void set_margin(double m);

    bool in_domain(std::span<const double> action) const;
    /// Gradient of h (no domain check).
    Vec gradient(std::span<const double> action) const;
    Eigen::MatrixXd hessian(std::span<const double> action) const;
    /// True when the Hessian is constant (degree <= 2).
    bool is_quadratic() const noexcept { return h_.max_degree() <= 2; }

private:
    FTPolynomial h_;
    double radius_;
    std::optional<double> bound_M_;
    std::optional<double> margin_m_;
    std::vector<FTPolynomial> grad_;
    std::vector<FTPolynomial> hess_;  // row-major n x n
};

/// Closed sup-norm ball.
struct Ball {
    Vec center;
    double radius = 0.0;
};

/** Sub-module Lambda of Z^n given by a list of independent integer vectors. */
class ResonanceModule {
public:
    ResonanceModule(int n, std::vector<IntVec> basis = {});

    int dims() const noexcept { return n_; }
    const std::vector<IntVec>& basis() const noexcept { return basis_; }
    int rank() const noexcept { return static_cast<int>(basis_.size()); }
    int codim() const noexcept { return n_ - rank(); }
    bool trivial() const noexcept { return basis_.empty(); }

private:
    int n_;
    std::vector<IntVec> basis_;
};

/// omega = grad h(I); throws DomainError outside B_R.
Vec frequency(const IntegrableModel& model, std::span<const double> action);

/// Condition (B): the coefficient bound of |h|_{C^k(B_R)} against M.
bool satisfies_bound(const IntegrableModel& model, int k_reg);

/** Sampled quasi-convexity margin: the minimum over sample points of the
    smallest eigenvalue of the Hessian restricted to grad h(I)^perp.  The
    sample set for `grid_per_dim = g` is the union of the uniform grids with
    1..g points per axis on the region, so refining never loses samples. */
double quasiconvexity_margin(const IntegrableModel& model, const Ball& region, int grid_per_dim);

/// Restricted-Hessian eigenvalue at one point; throws SingularError when grad h = 0.
double restricted_hessian_min_eigenvalue(const IntegrableModel& model, std::span<const double> action);

/** Damped Newton solve of grad h(I) = omega starting from `guess`.  Converges
    to |grad h(I) - omega|_inf <= 1e-12 (1 + |omega|_inf) within 50 iterations
    or throws ConvergenceError carrying the last iterate. */
Vec action_from_frequency(const IntegrableModel& model, std::span<const double> omega,
                          std::span<const double> guess);

struct ResonanceDistance {
    double distance = 0.0;  ///< Euclidean distance from I0 to the nearest point found
    Vec nearest;
    double optimality_gap = 0.0;  ///< tangential residual of the KKT condition
    bool exact = false;           ///< closed form (affine frequency map)
};

/** Distance from I0 to S_Lambda = {I : k.grad h(I) = 0 for k in Lambda}.
    Exact least-norm projection when grad h is affine; otherwise a
    Gauss-Newton projection with its optimality gap reported. */
ResonanceDistance resonance_distance(const IntegrableModel& model, std::span<const double> action0,
                                     const ResonanceModule& module);

}  // namespace nekh
