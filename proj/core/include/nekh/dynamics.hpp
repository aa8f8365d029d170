#pragma once

#include <string>
#include <vector>

#include "nekh/evaluator.hpp"
#include "nekh/system.hpp"

namespace nekh {

/// (theta, I) at time t; angles reduced to [0, 1).
struct PhaseState {
    Vec theta;
    Vec action;
    double t = 0.0;
};

/** Implicit midpoint rule z1 = z0 + h X((z0 + z1) / 2) for a polynomial
    Hamiltonian, solved by fixed-point iteration.  Holds scratch space, so
    one instance per thread. */
class ImplicitMidpoint {
public:
    static constexpr int kMaxIterations = 50;
    static constexpr double kTolerance = 1e-13;

    explicit ImplicitMidpoint(const FTPolynomial& H);

    int dims() const noexcept { return ev_.dims(); }
    double energy(const PhaseState& s);

    /// One step; throws ConvergenceError when the iteration does not contract.
    PhaseState step(const PhaseState& s, double h);
    /// Same without reducing the angles (for Jacobian checks).
    PhaseState step_unreduced(const PhaseState& s, double h);

    int last_iterations() const noexcept { return last_iterations_; }

private:
    void field(std::span<const double> z, std::span<double> out);

    HamiltonianEvaluator ev_;
    HamiltonianEvaluator::Workspace ws_;
    Vec z0_, z1_, zm_, dz_, d_theta_, d_action_;
    int last_iterations_ = 0;
};

PhaseState step_implicit_midpoint(const NearIntegrableSystem& system, const PhaseState& s, double h);

enum class ExitKind { Horizon, Drift, Domain, Failure };
const char* to_string(ExitKind k);
ExitKind exit_kind_from_string(const std::string& s);

struct TrajectorySample {
    double t = 0.0;
    Vec action;
    double energy = 0.0;
    double max_drift = 0.0;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    double exit_time = 0.0;
    ExitKind exit_kind = ExitKind::Horizon;
    double max_drift = 0.0;
    double energy_drift = 0.0;
    std::int64_t steps = 0;
    std::string message;
    PhaseState final_state;
};

struct IntegrateOptions {
    double horizon = 1.0;
    double h_step = 0.01;
    double drift_threshold = std::numeric_limits<double>::infinity();
    std::int64_t sample_stride = 0;  ///< 0: only the first and last states
};

/** Integrates until the horizon, the first step with |I - I(0)|_inf above the
    threshold, or an exit from B_R.  Step failures are recorded, not thrown. */
TrajectoryRecord integrate(const NearIntegrableSystem& system, const PhaseState& state0, const IntegrateOptions& opt);

struct ConfinementSeries {
    Vec t;
    Vec parallel;    ///< (I(t) - I(0)).omega_hat
    Vec orthogonal;  ///< |component orthogonal to omega|_2
};

ConfinementSeries confinement_decomposition(const TrajectoryRecord& record, std::span<const double> omega_per);

}  // namespace nekh
