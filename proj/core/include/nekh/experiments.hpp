#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nekh/dynamics.hpp"

namespace nekh {

/// Reduced fraction num / den with den > 0.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Stability exponents: |I(t) - I(0)| <= c1 eps^b for |t| <= c2 eps^{-a}.
struct Exponents {
    Rational a;
    Rational b;
};

/** a = (k-2)/(2n), b = 1/(2n); with d given, a_d = (k-2)/(2d), b_d = 1/(2d).
    Throws DomainError for k < 3 (the k = 2 estimate carries no time scale). */
Exponents theorem_exponents(int k_reg, int n, std::optional<int> d = std::nullopt);

/// Counter-based generator: splitmix64 applied to a mix of the three inputs.
std::uint64_t counter_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

struct SweepConfig {
    int n = 2;
    int k_reg = 3;
    Vec eps_grid;                 ///< strictly decreasing
    int ensemble = 1;
    std::uint64_t seed = 1;
    double R = 1.0;
    nlohmann::json h = nullptr;   ///< h description as in system_from_json; null is 1/2 |I|^2

    // perturbation synthesis
    int fourier_cap = 8;
    int action_degree = 1;
    double decay_exponent = 0.0;
    std::optional<std::uint64_t> perturbation_seed;  ///< defaults to seed; shared by every eps

    // horizon = min(horizon_cap, horizon_coeff eps^{-horizon_exponent})
    double horizon_cap = 1e4;
    double horizon_coeff = 1.0;
    std::optional<double> horizon_exponent;  ///< defaults to the theorem's a

    // threshold = drift_abs if set, else drift_coeff eps^{drift_exponent}
    std::optional<double> drift_abs;
    double drift_coeff = 1.0;
    std::optional<double> drift_exponent;    ///< defaults to the theorem's b

    // h_step = h_step_fixed if set, else min(h_step_max, sqrt(eps))
    std::optional<double> h_step_fixed;
    double h_step_max = 0.05;

    double initial_margin = 0.0;  ///< initial actions uniform in B(center, R/2 - margin)
    std::vector<IntVec> lambda;   ///< optional resonance module
    double sigma = 1.0;           ///< near-resonant samples within sigma sqrt(eps) of S_Lambda
    double step_budget = 5e9;     ///< warn above this many total steps

    double horizon_for(double eps) const;
    double threshold_for(double eps) const;
    double h_step_for(double eps) const;
    Exponents exponents() const;
    void validate() const;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepConfig& cfg);

struct StabilityRecord {
    int eps_index = 0;
    double eps = 0.0;
    int ensemble_idx = 0;
    double exit_time = 0.0;
    ExitKind exit_kind = ExitKind::Horizon;
    double max_drift = 0.0;
    double energy_drift = 0.0;
    std::int64_t steps = 0;
    Vec initial_action;
};

struct SweepResult {
    std::vector<StabilityRecord> records;  ///< ordered by (eps index, ensemble index)
    std::vector<std::string> warnings;
};

/// The perturbation used at grid point eps.
NearIntegrableSystem sweep_system(const SweepConfig& cfg, double eps);

/// Initial state of run (eps_index, ensemble_idx); independent of threading.
PhaseState sweep_initial_state(const SweepConfig& cfg, const NearIntegrableSystem& system, int eps_index,
                               int ensemble_idx);

/// threads <= 0 uses the hardware concurrency.
SweepResult run_sweep(const SweepConfig& cfg, int threads = 1);

void write_sweep_csv(std::ostream& os, const std::vector<StabilityRecord>& records);
std::vector<StabilityRecord> read_sweep_csv(std::istream& is);

enum class FitQuantity { ExitTime, MaxDrift };
FitQuantity fit_quantity_from_string(const std::string& s);

struct FitResult {
    bool censored = false;   ///< too few uncensored eps values for a slope
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    Vec residuals;
    Vec log_eps;
    Vec log_quantity;
    double eps_min = 0.0;
    double eps_max = 0.0;
    std::optional<double> target_exponent;
};

/// Ordinary least squares y = slope x + intercept.
FitResult least_squares(std::span<const double> x, std::span<const double> y);

/** Log-log fit against eps.  Exit time: per eps the smallest drift-exit time
    (runs that reached the horizon are censored and skipped).  Max drift: per
    eps the largest drift over runs that did not fail.  Needs >= 3 eps values;
    otherwise the result is flagged censored. */
FitResult fit_exponent(const std::vector<StabilityRecord>& records, FitQuantity quantity);

nlohmann::json to_json(const FitResult& fit);
/// Two columns log10(eps), log10(quantity).
void write_plot_tsv(std::ostream& os, const FitResult& fit);

}  // namespace nekh
