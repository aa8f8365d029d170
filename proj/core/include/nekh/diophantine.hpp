#pragma once

#include <optional>

#include "json.hpp"
#include "nekh/common.hpp"
#include "nekh/geometry.hpp"

namespace nekh {

/// Which component of omega normalizes the ratios that get approximated.
enum class Normalizer { Largest, First };

/** A periodic frequency close to a given one.  T omega_per = p with p in
    Z^n \ {0} primitive, so T is the minimal period. */
struct PeriodicOrbitApprox {
    double T = 0.0;
    IntVec p;
    Vec omega_per;
    std::int64_t q = 0;          ///< denominator found by the scan (before gcd reduction)
    int normalizer = 0;          ///< index j of the normalizing component
    double objective = 0.0;      ///< max_{i != j} |q omega_i / omega_j - p_i|
    double approx_error = 0.0;   ///< |omega - omega_per|_inf
    bool dirichlet_skipped = false;  ///< codimension-1 resonance: period read off directly
    std::optional<Vec> I_star;
    std::optional<double> action_error;  ///< |I0 - I_star|_inf
};

/// Dirichlet's bound Q^{-1/(n-1)} on the scan objective (0 for n = 1).
double dirichlet_bound(double Q, int n);

/** Brute-force simultaneous approximation: scans q = 1..ceil(Q) for the
    smallest max_{i != j} dist(q omega_i / omega_j, Z), ties to the smallest
    q, then reduces (q, p) by their gcd.  The Dirichlet bound is asserted. */
PeriodicOrbitApprox dirichlet_approx(std::span<const double> omega, double Q,
                                     Normalizer normalizer = Normalizer::Largest);

/// Q = c_Q eps^{-(d-1)/(2d)}.
double period_bound_Q(double eps, int d, double c_Q = 1.0);

/// Fills I_star (Newton inversion of the frequency map from I0) and action_error.
PeriodicOrbitApprox periodic_action(const IntegrableModel& model, PeriodicOrbitApprox approx,
                                    std::span<const double> action0);

/** Periodic approximation constrained to a resonance: omega is expressed in
    an integer basis B of Lambda^perp cap Z^n, omega = B y, and y is
    approximated in dimension d.  For d = 1 no scan happens. */
PeriodicOrbitApprox resonant_dirichlet_approx(std::span<const double> omega, const ResonanceModule& module,
                                              double Q, Normalizer normalizer = Normalizer::Largest);

/// {"q", "p", "T", "omega_per", "error"} plus I_star/action_error when set.
nlohmann::json to_json(const PeriodicOrbitApprox& a);

}  // namespace nekh
