#pragma once

#include <optional>

#include "json.hpp"
#include "nekh/diophantine.hpp"
#include "nekh/dynamics.hpp"
#include "nekh/experiments.hpp"
#include "nekh/normalform.hpp"

namespace nekh {

struct CertificateConstants {
    double C_Q = 1.0;
    double C_mu = 1.0;
    double C_r = 1.0;
    double C_tau = 1.0;
    double sigma = 1.0;       ///< d(I0, S_Lambda) <= sigma sqrt(eps)
    double c_drift = 1.0;     ///< predicted drift c_drift eps^{b_d}
    double c_time = 1.0;      ///< predicted time c_time eps^{-a_d}
    Normalizer normalizer = Normalizer::Largest;
    NormalFormConfig normal_form;  ///< steps < 0 here means k - 2
    int displacement_samples = 16;
    std::uint64_t seed = 1;

    bool validate = true;
    double validation_h_step = 0.01;
    Vec initial_angle;  ///< defaults to the origin
};

CertificateConstants certificate_constants_from_json(const nlohmann::json& j);

/// The three steps for one initial action.
struct Certificate {
    // step 1
    int n = 0;
    int d = 0;
    Exponents exponents;
    double eps = 0.0;
    double distance_to_resonance = 0.0;
    Vec I0;
    Vec I_projected;
    double Q = 0.0;
    PeriodicOrbitApprox approx;  ///< with I_star and action_error filled
    double predicted_action_error = 0.0;  ///< T^{-1} eps^{1/(2d)}

    // step 2
    double mu = 0.0;
    LocalNormalForm normal_form;
    double measured_displacement = 0.0;  ///< max |Pi_I Phi - I| over sampled points of B(I_*, mu)

    // step 3
    double r = 0.0;
    double tau = 0.0;
    double predicted_drift = 0.0;  ///< c_drift eps^{b_d}
    double predicted_time = 0.0;   ///< c_time eps^{-a_d}
    double transfer_bound = 0.0;   ///< r + 2 measured_displacement

    bool validated = false;
    double validation_horizon = 0.0;
    double validation_drift = 0.0;
    ExitKind validation_exit = ExitKind::Horizon;
    bool validation_passed = false;
};

/** Runs the arithmetic, analytic and geometric steps near I0.  Every
    violated smallness condition raises ConditionError naming it. */
Certificate build_certificate(const NearIntegrableSystem& system, std::span<const double> I0,
                              const ResonanceModule& lambda, const CertificateConstants& constants);

nlohmann::json to_json(const Certificate& c);

}  // namespace nekh
