#include "nekh/certificate.hpp"

#include <cmath>
#include <random>

#include "nekh/flow.hpp"

namespace nekh {

CertificateConstants certificate_constants_from_json(const nlohmann::json& j) {
    CertificateConstants c;
    try {
        c.C_Q = j.value("C_Q", c.C_Q);
        c.C_mu = j.value("C_mu", c.C_mu);
        c.C_r = j.value("C_r", c.C_r);
        c.C_tau = j.value("C_tau", c.C_tau);
        c.sigma = j.value("sigma", c.sigma);
        c.c_drift = j.value("c_drift", c.c_drift);
        c.c_time = j.value("c_time", c.c_time);
        const std::string norm = j.value("normalizer", "largest");
        if (norm == "largest") c.normalizer = Normalizer::Largest;
        else if (norm == "first") c.normalizer = Normalizer::First;
        else throw ParseError("certificate: unknown normalizer '" + norm + "'");
        c.normal_form.steps = -1;
        if (j.contains("normal_form")) {
            const auto& nf = j["normal_form"];
            c.normal_form.steps = nf.value("steps", -1);
            c.normal_form.lie_order = nf.value("lie_order", c.normal_form.lie_order);
            c.normal_form.degree_cap = nf.value("degree_cap", c.normal_form.degree_cap);
            c.normal_form.fourier_cap = nf.value("fourier_cap", c.normal_form.fourier_cap);
            c.normal_form.norm_order = nf.value("norm_order", c.normal_form.norm_order);
            c.normal_form.residual_fail_threshold =
                nf.value("residual_fail_threshold", c.normal_form.residual_fail_threshold);
            c.normal_form.c1 = nf.value("c1", c.normal_form.c1);
            c.normal_form.c2 = nf.value("c2", c.normal_form.c2);
            c.normal_form.c3 = nf.value("c3", c.normal_form.c3);
        }
        c.displacement_samples = j.value("displacement_samples", c.displacement_samples);
        c.seed = j.value("seed", c.seed);
        c.validate = j.value("validate", c.validate);
        c.validation_h_step = j.value("validation_h_step", c.validation_h_step);
        if (j.contains("initial_angle")) c.initial_angle = j["initial_angle"].get<Vec>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("certificate constants: ") + e.what());
    }
    return c;
}

Certificate build_certificate(const NearIntegrableSystem& system, std::span<const double> I0,
                              const ResonanceModule& lambda, const CertificateConstants& constants) {
    const int n = system.dims();
    if (static_cast<int>(I0.size()) != n || lambda.dims() != n) throw DimensionError("build_certificate: dims");
    const IntegrableModel model = system.model();
    if (!model.in_domain(I0)) throw DomainError("build_certificate: I0 outside B_R");

    Certificate c;
    c.n = n;
    c.d = lambda.codim();
    c.exponents = theorem_exponents(system.k_reg, n, c.d);
    c.eps = system.eps;
    c.I0.assign(I0.begin(), I0.end());
    const double eps = system.eps;
    const double root = std::pow(eps, 1.0 / (2.0 * c.d));  // eps^{1/(2d)}

    // First step: a periodic action near I0.
    const ResonanceDistance rd = resonance_distance(model, I0, lambda);
    c.distance_to_resonance = rd.distance;
    c.I_projected = rd.nearest;
    if (rd.distance > constants.sigma * std::sqrt(eps))
        throw ConditionError("d(I0, S_Lambda) <= sigma sqrt(eps)", rd.distance, constants.sigma * std::sqrt(eps));
    c.Q = c.d == 1 ? constants.C_Q : period_bound_Q(eps, c.d, constants.C_Q);
    if (c.d > 1 && c.Q < 1.0) throw ConditionError("Q >= 1", 1.0, c.Q);
    const Vec omega0 = frequency(model, c.I_projected);
    c.approx = resonant_dirichlet_approx(omega0, lambda, std::max(c.Q, 1.0), constants.normalizer);
    c.approx = periodic_action(model, c.approx, I0);
    const double T = c.approx.T;
    c.predicted_action_error = root / T;

    // Second step: normal form on B(I_*, mu).
    c.mu = constants.C_mu * root / T;
    NormalFormConfig nf = constants.normal_form;
    if (nf.steps < 0) nf.steps = system.k_reg - 2;
    c.normal_form = local_normal_form(system, *c.approx.I_star, c.approx.p, T, c.mu, nf);

    std::mt19937_64 gen(constants.seed);
    auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < constants.displacement_samples; ++s) {
        PhasePoint x{Vec(n), Vec(n)};
        for (int j = 0; j < n; ++j) {
            x.theta[j] = uniform();
            x.action[j] = 2.0 * uniform() - 1.0;  // scaled ball D_1
        }
        c.measured_displacement = std::max(
            c.measured_displacement, c.mu * action_displacement(c.normal_form.scaled.generators, x));
    }

    // Third step: confinement radius and time.
    c.r = constants.C_r * c.mu;
    c.tau = constants.C_tau * std::pow(T * c.mu, -static_cast<double>(system.k_reg - 2));
    c.predicted_drift = constants.c_drift * std::pow(eps, c.exponents.b.value());
    c.predicted_time = constants.c_time * std::pow(eps, -c.exponents.a.value());
    c.transfer_bound = c.r + 2.0 * c.measured_displacement;

    if (constants.validate) {
        PhaseState s0;
        s0.action = c.I0;
        s0.theta = constants.initial_angle.empty() ? Vec(n, 0.0) : constants.initial_angle;
        if (static_cast<int>(s0.theta.size()) != n) throw DimensionError("build_certificate: initial_angle length");
        IntegrateOptions opt;
        opt.horizon = c.tau;
        opt.h_step = constants.validation_h_step;
        const TrajectoryRecord tr = integrate(system, s0, opt);
        c.validated = true;
        c.validation_horizon = tr.exit_time;
        c.validation_drift = tr.max_drift;
        c.validation_exit = tr.exit_kind;
        c.validation_passed = tr.exit_kind == ExitKind::Horizon && tr.max_drift <= c.predicted_drift;
    }
    return c;
}

nlohmann::json to_json(const Certificate& c) {
    nlohmann::json j;
    j["n"] = c.n;
    j["d"] = c.d;
    j["exponents"] = {{"a", c.exponents.a.str()}, {"b", c.exponents.b.str()},
                      {"a_value", c.exponents.a.value()}, {"b_value", c.exponents.b.value()}};
    j["eps"] = c.eps;
    j["step1"] = {{"I0", c.I0},
                  {"distance_to_resonance", c.distance_to_resonance},
                  {"I_projected", c.I_projected},
                  {"Q", c.Q},
                  {"branch", c.approx.dirichlet_skipped ? "skip-dirichlet" : "dirichlet"},
                  {"periodic", to_json(c.approx)},
                  {"predicted_action_error", c.predicted_action_error}};
    j["step2"] = {{"mu", c.mu},
                  {"T_mu", c.approx.T * c.mu},
                  {"normal_form", to_json(c.normal_form)},
                  {"measured_displacement", c.measured_displacement}};
    j["step3"] = {{"r", c.r},
                  {"tau", c.tau},
                  {"predicted_drift", c.predicted_drift},
                  {"predicted_time", c.predicted_time},
                  {"transfer_bound", c.transfer_bound}};
    if (c.validated)
        j["validation"] = {{"horizon", c.validation_horizon},
                           {"max_drift", c.validation_drift},
                           {"exit_kind", to_string(c.validation_exit)},
                           {"passed", c.validation_passed}};
    return j;
}

}  // namespace nekh
