#pragma once

#include <vector>

#include "json.hpp"
#include "nekh/algebra.hpp"
#include "nekh/system.hpp"

namespace nekh {

struct NormalFormConfig {
    int steps = 1;             ///< number of averaging steps (k - 2 for the theorem)
    int lie_order = 3;         ///< highest power of the bracket operator kept in the Lie series
    int degree_cap = 6;        ///< D: max |alpha| kept
    int fourier_cap = 16;      ///< K: max |k|_1 kept
    double mu = 0.0;           ///< scaled perturbation size
    double rho = 2.0;          ///< radius of the scaled domain D_rho
    int norm_order = 2;        ///< C^order bounds reported in the ledger
    double residual_fail_threshold = 1e-6;
    double c1 = 0.25;          ///< eps <= c1 mu^2
    double c2 = 0.5;           ///< mu <= c2
    double c3 = 0.25;          ///< T mu <= c3

    /// rho_j = rho - j rho / (2 steps)
    double radius_at(int j) const { return steps > 0 ? rho - j * rho / (2.0 * steps) : rho; }
    Truncation caps(double radius) const { return {fourier_cap, degree_cap, norm_order, radius}; }
};

struct LedgerEntry {
    int step = 0;
    double radius = 0.0;
    double f_norm_bound = 0.0;    ///< |f_j|
    double g_norm_bound = 0.0;    ///< |g_j|
    double chi_norm_bound = 0.0;  ///< |chi_j| (0 on the final row)
    double residual = 0.0;        ///< truncation residual dropped while forming step j + 1
    double homological_defect = 0.0;  ///< max coefficient of {chi_j, l} + f_j - [f_j]
};

struct LieTransformResult {
    FTPolynomial value;
    double residual = 0.0;     ///< series_tail + cap_dropped
    double series_tail = 0.0;
    double cap_dropped = 0.0;
};

/// Output of the iterated averaging in scaled variables: H o Phi = l + g + remainder.
struct NormalFormResult {
    std::vector<FTPolynomial> generators;
    FTPolynomial l;
    FTPolynomial g;
    FTPolynomial remainder;
    std::vector<LedgerEntry> ledger;
    IntVec p;
    double T = 0.0;
    Vec omega_per;
};

/// Keeps exactly the modes with k.p = 0.
FTPolynomial average_along_periodic_flow(const FTPolynomial& f, std::span<const std::int64_t> p, double T);

/// Mode (k, alpha) with m = k.p != 0 maps to c T / (2 pi i m); resonant modes vanish.
FTPolynomial homological_generator(const FTPolynomial& f, std::span<const std::int64_t> p, double T);

/** H o Phi^chi = sum_m L^m H / m! with L = {chi, .} (the derivative along
    X_chi), truncated at cfg.lie_order and at the caps.  The residual is a
    geometric tail estimate from the last two computed terms plus the bound of
    every cap-dropped term, measured in C^norm_order on the ball of `radius`.
    Throws TruncationError above cfg.residual_fail_threshold. */
LieTransformResult lie_transform(const FTPolynomial& H, const FTPolynomial& chi, const NormalFormConfig& cfg,
                                 double radius);
LieTransformResult lie_transform(const FTPolynomial& H, const FTPolynomial& chi, const NormalFormConfig& cfg);

/** Runs cfg.steps averaging steps on l + f with l = (p / T).J.  Requires
    T cfg.mu <= cfg.c3. */
NormalFormResult iterate_normal_form(const FTPolynomial& l, const FTPolynomial& f, std::span<const std::int64_t> p,
                                     double T, const NormalFormConfig& cfg);

/** H_mu = mu^{-1} H o sigma_mu with sigma_mu(theta, J) = (theta, I_* + mu J),
    split as constant + l + f_mu. */
struct ScaledSystem {
    FTPolynomial l;
    FTPolynomial f_mu;      ///< mu h_mu + mu^{-1} f o sigma_mu + (grad h(I_*) - omega_per).J
    FTPolynomial mu_h_mu;   ///< mu h_mu, the order >= 2 Taylor part
    FTPolynomial f_scaled;  ///< mu^{-1} f o sigma_mu
    double constant = 0.0;  ///< mu^{-1} h(I_*)
    Vec I_star;
    double mu = 0.0;
    Vec omega_per;
};

ScaledSystem rescale_system(const NearIntegrableSystem& system, std::span<const double> I_star, double mu,
                            std::span<const double> omega_per);
/// l = grad h(I_*).
ScaledSystem rescale_system(const NearIntegrableSystem& system, std::span<const double> I_star, double mu);

/// Inverse of the scaling: mu p((I - I_*) / mu), expanded around I_*.
FTPolynomial unscale(const FTPolynomial& p_scaled, std::span<const double> I_star, double mu);

/// Normal form in the original variables: H o Phi = h + g + f_tilde near I_*.
struct LocalNormalForm {
    NormalFormResult scaled;
    ScaledSystem system;
    FTPolynomial g;
    FTPolynomial f_tilde;
    Vec I_star;
    double mu = 0.0;
    double eps = 0.0;
    double gf_c0_bound = 0.0;         ///< |g + f_tilde|_{C^0} bound on B(I_*, mu)
    double angle_gradient = 0.0;      ///< |d_theta f_tilde| bound on B(I_*, mu)
    double claimed_gf = 0.0;          ///< mu^2
    double claimed_angle_gradient = 0.0;  ///< (T mu)^steps mu^2
    double claimed_displacement = 0.0;    ///< T mu^2
};

/** Rescale, average, unscale.  Checks eps <= c1 mu^2, mu <= c2, T mu <= c3
    and B(I_*, 2 mu) inside B_R, each reported by name on failure. */
LocalNormalForm local_normal_form(const NearIntegrableSystem& system, std::span<const double> I_star,
                                  std::span<const std::int64_t> p, double T, double mu, const NormalFormConfig& cfg);

/// True when every mode k of g has k.p = 0 (integer arithmetic).
bool is_resonant(const FTPolynomial& g, std::span<const std::int64_t> p);

nlohmann::json to_json(const LedgerEntry& e);
nlohmann::json to_json(const NormalFormResult& r);
nlohmann::json to_json(const LocalNormalForm& r);

}  // namespace nekh
