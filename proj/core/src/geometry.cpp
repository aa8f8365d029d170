#include "nekh/geometry.hpp"

#include <cmath>
#include <limits>

namespace nekh {

namespace {

Eigen::VectorXd to_eigen(std::span<const double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

Eigen::MatrixXd module_matrix(const ResonanceModule& module) {
    Eigen::MatrixXd K(module.rank(), module.dims());
    for (int r = 0; r < module.rank(); ++r)
        for (int c = 0; c < module.dims(); ++c) K(r, c) = static_cast<double>(module.basis()[r][c]);
    return K;
}

}  // namespace

IntegrableModel::IntegrableModel(FTPolynomial h, double radius, std::optional<double> bound_M,
                                 std::optional<double> margin_m)
    : h_(std::move(h)), radius_(radius), bound_M_(bound_M), margin_m_(margin_m) {
    if (!h_.is_integrable()) throw DomainError("IntegrableModel: h must not depend on the angles");
    if (!(radius_ > 0.0)) throw DomainError("IntegrableModel: radius must be > 0");
    if (bound_M_ && !(*bound_M_ > 0.0)) throw DomainError("IntegrableModel: M must be > 0");
    if (margin_m_ && !(*margin_m_ > 0.0)) throw DomainError("IntegrableModel: m must be > 0");
    const int n = h_.dims();
    for (int i = 0; i < n; ++i) grad_.push_back(derivative_action(h_, i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hess_.push_back(derivative_action(grad_[i], j));
}

void IntegrableModel::set_margin(double m) {
    if (!(m > 0.0)) throw DomainError("IntegrableModel: m must be > 0");
    margin_m_ = m;
}

bool IntegrableModel::in_domain(std::span<const double> action) const {
    if (static_cast<int>(action.size()) != dims()) throw DimensionError("IntegrableModel: action length mismatch");
    for (int j = 0; j < dims(); ++j)
        if (std::abs(action[j] - h_.center()[j]) > radius_) return false;
    return true;
}

Vec IntegrableModel::gradient(std::span<const double> action) const {
    const int n = dims();
    if (static_cast<int>(action.size()) != n) throw DimensionError("gradient: action length mismatch");
    const Vec theta(n, 0.0);
    Vec g(n);
    for (int j = 0; j < n; ++j) g[j] = evaluate(grad_[j], theta, action);
    return g;
}

Eigen::MatrixXd IntegrableModel::hessian(std::span<const double> action) const {
    const int n = dims();
    if (static_cast<int>(action.size()) != n) throw DimensionError("hessian: action length mismatch");
    const Vec theta(n, 0.0);
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H(i, j) = evaluate(hess_[i * n + j], theta, action);
    return 0.5 * (H + H.transpose());
}

ResonanceModule::ResonanceModule(int n, std::vector<IntVec> basis) : n_(n), basis_(std::move(basis)) {
    if (n < 1) throw DimensionError("ResonanceModule: n must be >= 1");
    for (const auto& v : basis_)
        if (static_cast<int>(v.size()) != n) throw DimensionError("ResonanceModule: basis vector length mismatch");
    if (!basis_.empty()) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(module_matrix(*this));
        if (lu.rank() != rank()) throw DomainError("ResonanceModule: basis vectors are linearly dependent");
    }
    if (codim() < 1) throw DomainError("ResonanceModule: rank must be < n (codimension d >= 1)");
}

Vec frequency(const IntegrableModel& model, std::span<const double> action) {
    if (!model.in_domain(action)) throw DomainError("frequency: action outside the domain ball B_R");
    return model.gradient(action);
}

bool satisfies_bound(const IntegrableModel& model, int k_reg) {
    if (!model.bound_M()) return false;
    return ck_norm_upper_bound(model.h(), k_reg, model.radius()) < *model.bound_M();
}

double restricted_hessian_min_eigenvalue(const IntegrableModel& model, std::span<const double> action) {
    const int n = model.dims();
    const Eigen::VectorXd g = to_eigen(model.gradient(action));
    const double gnorm = g.norm();
    if (!(gnorm > 1e-12)) throw SingularError("quasi-convexity: vanishing frequency at a sample point");
    if (n == 1) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd u = g / gnorm;

    // Orthonormal basis of u^perp: Gram-Schmidt on the coordinate vectors,
    // skipping the one most aligned with u.
    int skip = 0;
    for (int j = 1; j < n; ++j)
        if (std::abs(u[j]) > std::abs(u[skip])) skip = j;
    Eigen::MatrixXd P(n, n - 1);
    int col = 0;
    for (int j = 0; j < n; ++j) {
        if (j == skip) continue;
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
        v -= u.dot(v) * u;
        for (int c = 0; c < col; ++c) v -= P.col(c).dot(v) * P.col(c);
        P.col(col++) = v.normalized();
    }
    const Eigen::MatrixXd restricted = P.transpose() * model.hessian(action) * P;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(restricted, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

double quasiconvexity_margin(const IntegrableModel& model, const Ball& region, int grid_per_dim) {
    const int n = model.dims();
    if (grid_per_dim < 1) throw DomainError("quasiconvexity_margin: grid_per_dim must be >= 1");
    if (static_cast<int>(region.center.size()) != n) throw DimensionError("quasiconvexity_margin: region dims");
    if (region.radius < 0.0) throw DomainError("quasiconvexity_margin: negative radius");
    double best = std::numeric_limits<double>::infinity();
    Vec point(n);
    for (int g = 1; g <= grid_per_dim; ++g) {
        std::vector<int> idx(n, 0);
        while (true) {
            for (int j = 0; j < n; ++j)
                point[j] = (g == 1) ? region.center[j]
                                    : region.center[j] - region.radius + 2.0 * region.radius * idx[j] / (g - 1);
            best = std::min(best, restricted_hessian_min_eigenvalue(model, point));
            int j = 0;
            for (; j < n; ++j) {
                if (++idx[j] < g) break;
                idx[j] = 0;
            }
            if (j == n) break;
        }
    }
    return best;
}

Vec action_from_frequency(const IntegrableModel& model, std::span<const double> omega,
                          std::span<const double> guess) {
    const int n = model.dims();
    if (static_cast<int>(omega.size()) != n || static_cast<int>(guess.size()) != n)
        throw DimensionError("action_from_frequency: dimension mismatch");
    const Eigen::VectorXd target = to_eigen(omega);
    const double tol = 1e-12 * (1.0 + target.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd I = to_eigen(guess);
    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return to_eigen(model.gradient(to_vec(x))) - target;
    };
    Eigen::VectorXd F = residual(I);
    for (int iter = 0; iter < 50; ++iter) {
        if (F.lpNorm<Eigen::Infinity>() <= tol) return to_vec(I);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(model.hessian(to_vec(I)));
        if (lu.rank() < n) throw SingularError("action_from_frequency: singular Hessian");
        const Eigen::VectorXd step = lu.solve(-F);
        double s = 1.0;
        Eigen::VectorXd trial = I + step;
        Eigen::VectorXd Ft = residual(trial);
        while (Ft.lpNorm<Eigen::Infinity>() >= F.lpNorm<Eigen::Infinity>() && s > 1.0 / 1024) {
            s *= 0.5;
            trial = I + s * step;
            Ft = residual(trial);
        }
        I = trial;
        F = Ft;
    }
    if (F.lpNorm<Eigen::Infinity>() <= tol) return to_vec(I);
    throw ConvergenceError("action_from_frequency: Newton iteration did not converge", to_vec(I));
}

ResonanceDistance resonance_distance(const IntegrableModel& model, std::span<const double> action0,
                                     const ResonanceModule& module) {
    const int n = model.dims();
    if (module.dims() != n || static_cast<int>(action0.size()) != n)
        throw DimensionError("resonance_distance: dimension mismatch");
    ResonanceDistance out;
    out.nearest.assign(action0.begin(), action0.end());
    if (module.trivial()) {
        out.exact = true;
        return out;
    }
    const Eigen::MatrixXd K = module_matrix(module);
    const Eigen::VectorXd I0 = to_eigen(action0);

    if (model.is_quadratic()) {
        const Eigen::MatrixXd M = K * model.hessian(action0);
        const Eigen::VectorXd rhs = -K * to_eigen(model.gradient(action0));
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
        const Eigen::VectorXd d = cod.solve(rhs);
        if ((M * d - rhs).norm() > 1e-10 * (1.0 + rhs.norm()))
            throw DomainError("resonance_distance: resonant surface is empty");
        out.nearest = to_vec(I0 + d);
        out.distance = d.norm();
        out.exact = true;
    } else {
        Eigen::VectorXd I = I0;
        Eigen::MatrixXd J;
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            const Vec Iv = to_vec(I);
            const Eigen::VectorXd F = K * to_eigen(model.gradient(Iv));
            J = K * model.hessian(Iv);
            const Eigen::VectorXd e = I0 - I;
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
            const Eigen::VectorXd d = e + cod.solve(-F - J * e);
            I += d;
            if (d.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + I.lpNorm<Eigen::Infinity>())) {
                converged = true;
                break;
            }
        }
        const Eigen::VectorXd F = K * to_eigen(model.gradient(to_vec(I)));
        if (!converged && F.norm() > 1e-10)
            throw DomainError("resonance_distance: could not reach the resonant surface");
        // At a constrained minimizer I - I0 lies in the row space of J.
        const Eigen::VectorXd delta = I - I0;
        const Eigen::VectorXd normal_part =
            J.transpose() * (J * J.transpose()).completeOrthogonalDecomposition().solve(J * delta);
        out.optimality_gap = (delta - normal_part).norm();
        out.nearest = to_vec(I);
        out.distance = delta.norm();
    }
    if (!model.in_domain(out.nearest)) throw DomainError("resonance_distance: nearest resonant point leaves B_R");
    return out;
}

}  // namespace nekh
