#include "nekh/diophantine.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "nekh/lattice.hpp"

namespace nekh {

namespace {

double dist_to_int(double x) { return std::abs(x - std::nearbyint(x)); }

int pick_normalizer(std::span<const double> omega, Normalizer normalizer) {
    int j = -1;
    for (int i = 0; i < static_cast<int>(omega.size()); ++i) {
        if (omega[i] == 0.0) continue;
        if (normalizer == Normalizer::First) return i;
        if (j < 0 || std::abs(omega[i]) > std::abs(omega[j])) j = i;
    }
    return j;
}

}  // namespace

double dirichlet_bound(double Q, int n) {
    if (n <= 1) return 0.0;
    return std::pow(Q, -1.0 / (n - 1));
}

double period_bound_Q(double eps, int d, double c_Q) {
    if (!(eps > 0.0)) throw DomainError("period_bound_Q: eps must be > 0");
    if (d < 1) throw DomainError("period_bound_Q: d must be >= 1");
    return c_Q * std::pow(eps, -static_cast<double>(d - 1) / (2.0 * d));
}

PeriodicOrbitApprox dirichlet_approx(std::span<const double> omega, double Q, Normalizer normalizer) {
    const int n = static_cast<int>(omega.size());
    if (n < 1) throw DimensionError("dirichlet_approx: empty frequency");
    if (!(Q >= 1.0)) throw DomainError("dirichlet_approx: Q must be >= 1");
    for (double w : omega)
        if (!std::isfinite(w)) throw DomainError("dirichlet_approx: non-finite frequency");
    const int j = pick_normalizer(omega, normalizer);
    if (j < 0) throw DomainError("dirichlet_approx: zero frequency vector");

    Vec ratio(n);
    for (int i = 0; i < n; ++i) ratio[i] = omega[i] / omega[j];

    const auto q_max = static_cast<std::int64_t>(std::ceil(Q));
    std::int64_t best_q = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t q = 1; q <= q_max; ++q) {
        double obj = 0.0;
        for (int i = 0; i < n && obj < best; ++i)
            if (i != j) obj = std::max(obj, dist_to_int(static_cast<double>(q) * ratio[i]));
        if (obj < best) {
            best = obj;
            best_q = q;
            if (obj == 0.0) break;
        }
    }
    if (best > dirichlet_bound(Q, n) * (1.0 + 1e-12))
        throw Error("dirichlet_approx: Dirichlet bound violated (internal error)");

    PeriodicOrbitApprox out;
    out.q = best_q;
    out.normalizer = j;
    out.objective = best;
    const double sign = omega[j] > 0.0 ? 1.0 : -1.0;
    out.p.resize(n);
    for (int i = 0; i < n; ++i)
        out.p[i] = static_cast<std::int64_t>(sign * std::nearbyint(static_cast<double>(best_q) * ratio[i]));
    const std::int64_t g = gcd_all(out.p);
    for (auto& v : out.p) v /= g;
    // p_j = sign q / g exactly, so q / g is an integer and T = (q/g)/|omega_j|.
    out.T = (static_cast<double>(best_q) / static_cast<double>(g)) / std::abs(omega[j]);
    out.omega_per.resize(n);
    for (int i = 0; i < n; ++i) {
        out.omega_per[i] = static_cast<double>(out.p[i]) / out.T;
        out.approx_error = std::max(out.approx_error, std::abs(omega[i] - out.omega_per[i]));
    }
    return out;
}

PeriodicOrbitApprox periodic_action(const IntegrableModel& model, PeriodicOrbitApprox approx,
                                    std::span<const double> action0) {
    if (static_cast<int>(action0.size()) != model.dims() || static_cast<int>(approx.omega_per.size()) != model.dims())
        throw DimensionError("periodic_action: dimension mismatch");
    Vec star = action_from_frequency(model, approx.omega_per, action0);
    double err = 0.0;
    for (std::size_t i = 0; i < star.size(); ++i) err = std::max(err, std::abs(action0[i] - star[i]));
    approx.I_star = std::move(star);
    approx.action_error = err;
    return approx;
}

PeriodicOrbitApprox resonant_dirichlet_approx(std::span<const double> omega, const ResonanceModule& module,
                                              double Q, Normalizer normalizer) {
    const int n = module.dims();
    if (static_cast<int>(omega.size()) != n) throw DimensionError("resonant_dirichlet_approx: dimension mismatch");
    if (module.trivial()) return dirichlet_approx(omega, Q, normalizer);

    const std::vector<IntVec> B = integer_kernel_basis(module.basis(), n);
    const int d = static_cast<int>(B.size());
    Eigen::MatrixXd Bm(n, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < n; ++r) Bm(r, c) = static_cast<double>(B[c][r]);
    Eigen::VectorXd w(n);
    for (int r = 0; r < n; ++r) w[r] = omega[r];
    const Eigen::VectorXd y = Bm.colPivHouseholderQr().solve(w);

    PeriodicOrbitApprox out;
    IntVec py;
    if (d == 1) {
        if (y[0] == 0.0) throw DomainError("resonant_dirichlet_approx: zero frequency on the resonance");
        out.dirichlet_skipped = true;
        out.q = 1;
        out.T = 1.0 / std::abs(y[0]);
        py = {y[0] > 0.0 ? 1 : -1};
    } else {
        const Vec yv(y.data(), y.data() + d);
        const PeriodicOrbitApprox inner = dirichlet_approx(yv, Q, normalizer);
        out.q = inner.q;
        out.normalizer = inner.normalizer;
        out.objective = inner.objective;
        out.T = inner.T;
        py = inner.p;
    }
    // B has saturated columns, so B p_y is primitive whenever p_y is.
    out.p.assign(n, 0);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < n; ++r) out.p[r] += B[c][r] * py[c];
    out.omega_per.resize(n);
    for (int i = 0; i < n; ++i) {
        out.omega_per[i] = static_cast<double>(out.p[i]) / out.T;
        out.approx_error = std::max(out.approx_error, std::abs(omega[i] - out.omega_per[i]));
    }
    return out;
}

nlohmann::json to_json(const PeriodicOrbitApprox& a) {
    nlohmann::json j;
    j["q"] = a.q;
    j["p"] = a.p;
    j["T"] = a.T;
    j["omega_per"] = a.omega_per;
    j["error"] = a.approx_error;
    j["objective"] = a.objective;
    j["normalizer_index"] = a.normalizer;
    if (a.dirichlet_skipped) j["dirichlet_skipped"] = true;
    if (a.I_star) j["I_star"] = *a.I_star;
    if (a.action_error) j["action_error"] = *a.action_error;
    return j;
}

}  // namespace nekh
