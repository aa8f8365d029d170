#include "nekh/dynamics.hpp"

#include <cmath>

namespace nekh {

ImplicitMidpoint::ImplicitMidpoint(const FTPolynomial& H) : ev_(H), ws_(ev_.make_workspace()) {
    const int n = ev_.dims();
    z0_.resize(2 * n);
    z1_.resize(2 * n);
    zm_.resize(2 * n);
    dz_.resize(2 * n);
    d_theta_.resize(n);
    d_action_.resize(n);
}

void ImplicitMidpoint::field(std::span<const double> z, std::span<double> out) {
    const int n = ev_.dims();
    ev_.gradient(z.subspan(0, n), z.subspan(n, n), d_theta_, d_action_, ws_);
    for (int j = 0; j < n; ++j) {
        out[j] = d_action_[j];
        out[n + j] = -d_theta_[j];
    }
}

double ImplicitMidpoint::energy(const PhaseState& s) { return ev_.value(s.theta, s.action, ws_); }

PhaseState ImplicitMidpoint::step_unreduced(const PhaseState& s, double h) {
    const int n = ev_.dims();
    if (static_cast<int>(s.theta.size()) != n || static_cast<int>(s.action.size()) != n)
        throw DimensionError("step: state dimension mismatch");
    std::copy(s.theta.begin(), s.theta.end(), z0_.begin());
    std::copy(s.action.begin(), s.action.end(), z0_.begin() + n);

    field(z0_, dz_);
    for (int i = 0; i < 2 * n; ++i) z1_[i] = z0_[i] + h * dz_[i];
    last_iterations_ = 0;
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
        for (int i = 0; i < 2 * n; ++i) zm_[i] = 0.5 * (z0_[i] + z1_[i]);
        field(zm_, dz_);
        double change = 0.0, scale = 1.0;
        for (int i = 0; i < 2 * n; ++i) {
            const double next = z0_[i] + h * dz_[i];
            change = std::max(change, std::abs(next - z1_[i]));
            scale = std::max(scale, std::abs(next));
            z1_[i] = next;
        }
        last_iterations_ = it + 1;
        if (!std::isfinite(change)) break;
        if (change <= kTolerance * scale) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("implicit midpoint: fixed-point iteration did not converge (step size too large?)",
                               z1_);
    return {Vec(z1_.begin(), z1_.begin() + n), Vec(z1_.begin() + n, z1_.end()), s.t + h};
}

PhaseState ImplicitMidpoint::step(const PhaseState& s, double h) {
    PhaseState out = step_unreduced(s, h);
    for (double& th : out.theta) th -= std::floor(th);
    return out;
}

PhaseState step_implicit_midpoint(const NearIntegrableSystem& system, const PhaseState& s, double h) {
    if (!(h > 0.0) && !(h < 0.0)) throw DomainError("step_implicit_midpoint: h_step must be non-zero");
    ImplicitMidpoint stepper(system.hamiltonian());
    return stepper.step(s, h);
}

const char* to_string(ExitKind k) {
    switch (k) {
        case ExitKind::Horizon: return "horizon";
        case ExitKind::Drift: return "drift";
        case ExitKind::Domain: return "domain";
        case ExitKind::Failure: return "failure";
    }
    return "failure";
}

ExitKind exit_kind_from_string(const std::string& s) {
    if (s == "horizon") return ExitKind::Horizon;
    if (s == "drift") return ExitKind::Drift;
    if (s == "domain") return ExitKind::Domain;
    if (s == "failure") return ExitKind::Failure;
    throw ParseError("unknown exit kind '" + s + "'");
}

TrajectoryRecord integrate(const NearIntegrableSystem& system, const PhaseState& state0, const IntegrateOptions& opt) {
    const int n = system.dims();
    if (static_cast<int>(state0.action.size()) != n || static_cast<int>(state0.theta.size()) != n)
        throw DimensionError("integrate: state dimension mismatch");
    if (!(opt.h_step > 0.0)) throw DomainError("integrate: h_step must be > 0");
    if (!(opt.horizon >= 0.0)) throw DomainError("integrate: horizon must be >= 0");
    const Vec& c = system.h.center();
    double offset = 0.0;
    for (int j = 0; j < n; ++j) offset = std::max(offset, std::abs(state0.action[j] - c[j]));
    const double margin = std::isfinite(opt.drift_threshold) ? opt.drift_threshold : 0.0;
    if (offset + margin > system.R) throw DomainError("integrate: initial action too close to the boundary of B_R");

    ImplicitMidpoint stepper(system.hamiltonian());
    TrajectoryRecord rec;
    PhaseState s = state0;
    for (double& th : s.theta) th -= std::floor(th);
    const double t0 = s.t;
    const double H0 = stepper.energy(s);
    rec.samples.push_back({t0, s.action, H0, 0.0});

    const auto total = static_cast<std::int64_t>(std::ceil(opt.horizon / opt.h_step - 1e-9));
    rec.exit_kind = ExitKind::Horizon;
    std::int64_t i = 0;
    double H = H0;
    for (; i < total; ++i) {
        try {
            s = stepper.step(s, opt.h_step);
        } catch (const ConvergenceError& e) {
            rec.exit_kind = ExitKind::Failure;
            rec.message = e.what();
            break;
        }
        s.t = t0 + static_cast<double>(i + 1) * opt.h_step;
        H = stepper.energy(s);
        rec.energy_drift = std::max(rec.energy_drift, std::abs(H - H0));
        double drift = 0.0, off = 0.0;
        for (int j = 0; j < n; ++j) {
            drift = std::max(drift, std::abs(s.action[j] - state0.action[j]));
            off = std::max(off, std::abs(s.action[j] - c[j]));
        }
        if (!std::isfinite(drift)) {
            rec.exit_kind = ExitKind::Failure;
            rec.message = "non-finite state";
            break;
        }
        rec.max_drift = std::max(rec.max_drift, drift);
        if (drift > opt.drift_threshold) {
            rec.exit_kind = ExitKind::Drift;
            ++i;
            break;
        }
        if (off > system.R) {
            rec.exit_kind = ExitKind::Domain;
            ++i;
            break;
        }
        if (opt.sample_stride > 0 && (i + 1) % opt.sample_stride == 0 && i + 1 < total)
            rec.samples.push_back({s.t, s.action, H, rec.max_drift});
    }
    rec.steps = i;
    rec.exit_time = s.t;
    if (rec.samples.back().t != s.t || rec.samples.size() == 1) rec.samples.push_back({s.t, s.action, H, rec.max_drift});
    rec.final_state = s;
    return rec;
}

ConfinementSeries confinement_decomposition(const TrajectoryRecord& record, std::span<const double> omega_per) {
    if (record.samples.empty()) throw DomainError("confinement_decomposition: empty record");
    const std::size_t n = omega_per.size();
    const double norm = euclidean_norm(omega_per);
    if (!(norm > 0.0)) throw DomainError("confinement_decomposition: zero frequency");
    const Vec& I0 = record.samples.front().action;
    if (I0.size() != n) throw DimensionError("confinement_decomposition: dimension mismatch");
    ConfinementSeries out;
    Vec delta(n);
    for (const auto& s : record.samples) {
        double par = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            delta[j] = s.action[j] - I0[j];
            par += delta[j] * omega_per[j] / norm;
        }
        double orth2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double o = delta[j] - par * omega_per[j] / norm;
            orth2 += o * o;
        }
        out.t.push_back(s.t);
        out.parallel.push_back(par);
        out.orthogonal.push_back(std::sqrt(orth2));
    }
    return out;
}

}  // namespace nekh
