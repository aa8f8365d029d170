#include <gtest/gtest.h>

#include <cmath>

#include "nekh/flow.hpp"
#include "nekh/normalform.hpp"
#include "test_util.hpp"

using namespace nekh;
using nekh::testing::along_flow;
using nekh::testing::random_polynomial;
using nekh::testing::simpson;
using nekh::testing::uniform;

namespace {

Vec frequency_of(const IntVec& p, double T) {
    Vec w;
    for (auto v : p) w.push_back(static_cast<double>(v) / T);
    return w;
}

IntVec random_period_vector(std::mt19937_64& gen, int n) {
    IntVec p(n, 0);
    while (gcd_all(p) == 0) {
        for (auto& v : p) v = static_cast<std::int64_t>(gen() % 7) - 3;
    }
    return p;
}

/// mu (1/2 |J|^2 + trig terms with linear action dependence), n = 2.
FTPolynomial model_perturbation(double mu) {
    FTPolynomial f = mu * standard_quadratic(2);
    f.add_mode(IntVec{1, 0}, IntVec{0, 0}, mu * 0.5);
    f.add_mode(IntVec{1, 1}, IntVec{1, 0}, mu * FTPolynomial::Coefficient(0.2, 0.1));
    f.add_mode(IntVec{0, 1}, IntVec{0, 1}, mu * 0.3);
    f.add_mode(IntVec{2, -1}, IntVec{0, 0}, mu * FTPolynomial::Coefficient(-0.1, 0.25));
    return f;
}

NormalFormConfig small_caps(double mu, int steps) {
    NormalFormConfig cfg;
    cfg.mu = mu;
    cfg.steps = steps;
    cfg.fourier_cap = 8;
    cfg.degree_cap = 4;
    return cfg;
}

}  // namespace

TEST(Averaging, FullyResonantIsFixed) {
    FTPolynomial f(2);
    f.add_mode(IntVec{0, 1}, IntVec{1, 0}, {0.3, 0.4});
    f.add_mode(IntVec{0, 3}, IntVec{0, 0}, 0.2);
    EXPECT_EQ(average_along_periodic_flow(f, IntVec{1, 0}, 1.0), f);
    EXPECT_TRUE(homological_generator(f, IntVec{1, 0}, 1.0).is_zero());
}

TEST(Averaging, ZeroIsZero) {
    EXPECT_TRUE(average_along_periodic_flow(FTPolynomial(2), IntVec{1, 2}, 1.0).is_zero());
}

TEST(Averaging, KeepsResonantCosine) {
    const auto f = FTPolynomial::cosine(2, IntVec{1, 0}, 1.0) + FTPolynomial::cosine(2, IntVec{0, 1}, 1.0);
    const auto avg = average_along_periodic_flow(f, IntVec{1, 0}, 1.0);
    EXPECT_EQ(avg, FTPolynomial::cosine(2, IntVec{0, 1}, 1.0));
    const Vec omega{1.0, 0.0};
    for (double t1 : {0.1, 0.37}) {
        const Vec th{t1, 0.21}, I{0.0, 0.0};
        const double q = simpson([&](double t) { return along_flow(f, th, I, omega, t); }, 0.0, 1.0, 10000);
        EXPECT_NEAR(evaluate(avg, th, I), q, 1e-10);
    }
}

TEST(Homological, CosineGivesSine) {
    const auto chi = homological_generator(FTPolynomial::cosine(2, IntVec{1, 0}, 1.0), IntVec{1, 0}, 1.0);
    for (double t1 : {0.0, 0.1, 0.3, 0.8})
        EXPECT_NEAR(evaluate(chi, Vec{t1, 0.4}, Vec{0, 0}), std::sin(kTwoPi * t1) / kTwoPi, 1e-15);
}

TEST(Homological, IdentityOnRandomPolynomials) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 2;
        const IntVec p = random_period_vector(gen, n);
        const double T = uniform(gen, 0.5, 3.0);
        const auto f = random_polynomial(gen, n, 6, 3, 20);
        const auto l = FTPolynomial::linear(frequency_of(p, T));
        const auto chi = homological_generator(f, p, T);
        const auto defect = poisson_bracket(chi, l) + f - average_along_periodic_flow(f, p, T);
        EXPECT_LE(max_abs_coefficient(defect), 1e-13);
    }
}

TEST(Homological, MatchesQuadratureOfDefiningIntegrals) {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 5; ++trial) {
        const IntVec p = random_period_vector(gen, 2);
        const double T = uniform(gen, 0.5, 2.0);
        const Vec omega = frequency_of(p, T);
        const auto f = random_polynomial(gen, 2, 4, 2, 8);
        const auto avg = average_along_periodic_flow(f, p, T);
        const auto chi = homological_generator(f, p, T);
        const auto osc = f - avg;
        const Vec th{uniform(gen), uniform(gen)}, I{uniform(gen, -1, 1), uniform(gen, -1, 1)};
        const double qa = simpson([&](double t) { return along_flow(f, th, I, omega, t); }, 0.0, T, 10000) / T;
        const double qc =
            simpson([&](double t) { return t * along_flow(osc, th, I, omega, t); }, 0.0, T, 10000) / T;
        EXPECT_NEAR(evaluate(avg, th, I), qa, 1e-9);
        EXPECT_NEAR(evaluate(chi, th, I), qc, 1e-9);
    }
}

TEST(LieTransform, ZeroGeneratorIsIdentity) {
    std::mt19937_64 gen(1);
    const auto H = random_polynomial(gen, 2, 4, 2, 10);
    const auto r = lie_transform(H, FTPolynomial(2), NormalFormConfig{});
    EXPECT_EQ(r.value, H);
    EXPECT_EQ(r.residual, 0.0);
}

TEST(LieTransform, FirstOrderTermOfLinearPart) {
    std::mt19937_64 gen(2);
    const IntVec p{1, 2};
    const double T = 1.5;
    const auto l = FTPolynomial::linear(frequency_of(p, T));
    const auto f = 0.01 * random_polynomial(gen, 2, 3, 0, 6);
    const auto chi = homological_generator(f, p, T);
    NormalFormConfig cfg;
    cfg.lie_order = 2;
    const auto r = lie_transform(l, chi, cfg);
    // f has no action dependence, so the series stops after the first bracket.
    EXPECT_LE(max_coefficient_difference(r.value, l + average_along_periodic_flow(f, p, T) - f), 1e-15);
}

TEST(LieTransform, AgreesWithNumericalFlow) {
    std::mt19937_64 gen(4);
    for (double mu : {1e-2, 1e-3}) {
        const IntVec p{1, 0};
        const double T = 1.0;
        const auto l = FTPolynomial::linear(frequency_of(p, T));
        const auto H = l + model_perturbation(mu);
        const auto chi = homological_generator(model_perturbation(mu), p, T);
        NormalFormConfig cfg = small_caps(mu, 1);
        const auto r = lie_transform(H, chi, cfg, 1.0);
        for (int s = 0; s < 30; ++s) {
            const PhasePoint x{{uniform(gen), uniform(gen)}, {uniform(gen, -0.5, 0.5), uniform(gen, -0.5, 0.5)}};
            const PhasePoint y = hamiltonian_flow(chi, x);
            const double err = std::abs(evaluate(r.value, x.theta, x.action) - evaluate(H, y.theta, y.action));
            EXPECT_LE(err, std::max(10.0 * r.residual, 1e-14 * std::max(1.0, std::abs(evaluate(H, y.theta, y.action)))));
        }
    }
}

TEST(Iterate, IntegrableInput) {
    const auto l = FTPolynomial::linear(Vec{1.0, 0.0});
    const auto r = iterate_normal_form(l, FTPolynomial(2), IntVec{1, 0}, 1.0, small_caps(0.01, 3));
    EXPECT_TRUE(r.g.is_zero());
    EXPECT_TRUE(r.remainder.is_zero());
    for (const auto& chi : r.generators) EXPECT_TRUE(chi.is_zero());
    EXPECT_EQ(r.ledger.size(), 4u);
}

TEST(Iterate, FullyResonantInputBecomesNormalForm) {
    FTPolynomial f = 0.01 * standard_quadratic(2);
    f.add_mode(IntVec{0, 1}, IntVec{1, 0}, 0.01);
    const auto l = FTPolynomial::linear(Vec{1.0, 0.0});
    const auto r = iterate_normal_form(l, f, IntVec{1, 0}, 1.0, small_caps(0.01, 1));
    EXPECT_EQ(r.g, f);
    EXPECT_TRUE(r.remainder.is_zero());
}

TEST(Iterate, GeneratorsAndResonance) {
    const double mu = 0.01;
    const auto l = FTPolynomial::linear(Vec{1.0, 0.0});
    const auto r = iterate_normal_form(l, model_perturbation(mu), IntVec{1, 0}, 1.0, small_caps(mu, 3));
    EXPECT_TRUE(is_resonant(r.g, r.p));
    ASSERT_EQ(r.generators.size(), 3u);
    for (const auto& e : r.ledger) EXPECT_LE(e.homological_defect, 1e-13);
    // Ledger |f_j| bounds decay by a factor of order T mu per step.
    for (int j = 0; j + 1 < static_cast<int>(r.ledger.size()); ++j) {
        const double ratio = r.ledger[j + 1].f_norm_bound / r.ledger[j].f_norm_bound;
        EXPECT_LE(ratio, 50.0 * mu) << "step " << j;
    }
}

TEST(Iterate, SmallnessIsChecked) {
    const auto l = FTPolynomial::linear(Vec{1.0, 0.0});
    auto cfg = small_caps(0.2, 1);
    try {
        iterate_normal_form(l, model_perturbation(0.2), IntVec{1, 0}, 2.0, cfg);
        FAIL();
    } catch (const ConditionError& e) {
        EXPECT_EQ(e.condition(), "T mu <= c3");
    }
}

TEST(Iterate, TruncationOverflowThrows) {
    const auto l = FTPolynomial::linear(Vec{1.0, 0.0});
    auto cfg = small_caps(0.2, 2);
    cfg.residual_fail_threshold = 1e-12;
    EXPECT_THROW(iterate_normal_form(l, model_perturbation(0.2), IntVec{1, 0}, 1.0, cfg), TruncationError);
}

TEST(Rescale, QuadraticIsPureTaylorRemainder) {
    const NearIntegrableSystem sys(standard_quadratic(2), FTPolynomial(2), 1.0, 3);
    const Vec I_star{0.3, 0.4};
    const double mu = 0.05;
    const auto s = rescale_system(sys, I_star, mu);
    EXPECT_LE(max_coefficient_difference(s.f_mu, mu * standard_quadratic(2)), 1e-16);
    EXPECT_NEAR(s.constant, 0.5 * 0.25 / mu, 1e-14);
    EXPECT_EQ(s.l, FTPolynomial::linear(I_star));
}

TEST(Rescale, UnscaleRoundTrip) {
    std::mt19937_64 gen(8);
    auto h = standard_quadratic(2);
    h.add_mode(IntVec{0, 0}, IntVec{3, 0}, 0.2);
    const auto f = random_polynomial(gen, 2, 3, 3, 10, 1e-4);
    const NearIntegrableSystem sys(h, f, 1.0, 3);
    const Vec I_star{0.2, -0.1};
    const double mu = 0.1;
    const auto s = rescale_system(sys, I_star, mu);
    const auto scaled_total = FTPolynomial::constant(2, s.constant) + s.l + s.f_mu;
    const auto back = unscale(scaled_total, I_star, mu);
    const auto ref = recenter(sys.hamiltonian(), I_star);
    EXPECT_LE(max_coefficient_difference(back, ref), 1e-13 * nekh::testing::coefficient_scale(ref));
}

TEST(Rescale, PerturbationScalesToMu) {
    RegularityProfile prof;
    const double mu = 0.1;
    prof.target_eps = mu * mu;
    prof.action_degree = 2;
    const auto f = synthesize_ck_perturbation(prof, 2);
    const NearIntegrableSystem sys(standard_quadratic(2), f, 1.0, 3);
    const auto s = rescale_system(sys, Vec{0.3, 0.1}, mu);
    const double b = ck_norm_upper_bound(s.f_scaled, 3, 2.0);
    EXPECT_LE(b, mu * (1 + 1e-12) * std::pow(1.0 + 0.3 + 2 * mu, 2) );
    EXPECT_GT(b, 0.1 * mu);
}

TEST(Rescale, DomainIsChecked) {
    const NearIntegrableSystem sys(standard_quadratic(2), FTPolynomial(2), 1.0, 3);
    EXPECT_THROW(rescale_system(sys, Vec{0.9, 0.0}, 0.1), ConditionError);
}

TEST(LocalNormalForm, IntegrableGivesNoCorrection) {
    const NearIntegrableSystem sys(standard_quadratic(2), FTPolynomial(2), 1.0, 3);
    NormalFormConfig cfg = small_caps(0.0, 2);
    const auto r = local_normal_form(sys, Vec{0.5, 0.0}, IntVec{1, 0}, 2.0, 0.1, cfg);
    EXPECT_LE(max_abs_coefficient(r.g), 1e-16);
    EXPECT_TRUE(r.f_tilde.is_zero());
}

TEST(LocalNormalForm, PreconditionsAreNamed) {
    RegularityProfile prof;
    prof.target_eps = 1e-3;
    const NearIntegrableSystem sys(standard_quadratic(2), synthesize_ck_perturbation(prof, 2), 1.0, 3);
    const NormalFormConfig cfg = small_caps(0.0, 1);
    auto condition = [&](double mu, double T) {
        try {
            local_normal_form(sys, Vec{1.0 / T, 0.0}, IntVec{1, 0}, T, mu, cfg);
        } catch (const ConditionError& e) {
            return e.condition();
        }
        return std::string("none");
    };
    EXPECT_EQ(condition(0.01, 2.0), "eps <= c1 mu^2");
    EXPECT_EQ(condition(0.6, 2.0), "mu <= c2");
    EXPECT_EQ(condition(0.2, 2.0), "T mu <= c3");
    EXPECT_EQ(condition(0.1, 1.0), "B(I_*, 2 mu) inside B_R");
    EXPECT_EQ(condition(0.1, 2.0), "none");
}

TEST(LocalNormalForm, MoreStepsShrinkAngleGradient) {
    const double mu = 0.05, T = 2.0;  // T mu = 0.1
    RegularityProfile prof;
    prof.target_eps = 0.2 * mu * mu;
    prof.fourier_cap = 4;
    prof.action_degree = 1;
    prof.k_reg = 5;
    const NearIntegrableSystem sys(standard_quadratic(2), synthesize_ck_perturbation(prof, 2), 1.0, 5);
    double prev = std::numeric_limits<double>::infinity();
    for (int steps = 1; steps <= 3; ++steps) {
        NormalFormConfig cfg = small_caps(mu, steps);
        cfg.residual_fail_threshold = 1e-3;
        const auto r = local_normal_form(sys, Vec{0.5, 0.0}, IntVec{1, 0}, T, mu, cfg);
        const double v = r.angle_gradient / (mu * mu);
        EXPECT_LT(v, prev) << "steps " << steps;
        prev = v;
    }
}

TEST(LocalNormalForm, ProjectionDisplacementIsOrderTMuSquared) {
    const double mu = 0.05, T = 2.0;
    RegularityProfile prof;
    prof.target_eps = 0.2 * mu * mu;
    prof.fourier_cap = 4;
    prof.k_reg = 4;
    const NearIntegrableSystem sys(standard_quadratic(2), synthesize_ck_perturbation(prof, 2), 1.0, 4);
    NormalFormConfig cfg = small_caps(mu, 2);
    cfg.residual_fail_threshold = 1e-3;
    const auto r = local_normal_form(sys, Vec{0.5, 0.0}, IntVec{1, 0}, T, mu, cfg);
    std::mt19937_64 gen(3);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const PhasePoint x{{uniform(gen), uniform(gen)}, {uniform(gen, -1, 1), uniform(gen, -1, 1)}};
        worst = std::max(worst, mu * action_displacement(r.scaled.generators, x));
    }
    EXPECT_GT(worst, 0.0);
    EXPECT_LE(worst, r.claimed_displacement);
}

TEST(LocalNormalForm, EnergyConsistencyInScaledVariables) {
    const double mu = 0.05, T = 2.0;
    RegularityProfile prof;
    prof.target_eps = 0.2 * mu * mu;
    prof.fourier_cap = 3;
    prof.k_reg = 4;
    const NearIntegrableSystem sys(standard_quadratic(2), synthesize_ck_perturbation(prof, 2), 1.0, 4);
    NormalFormConfig cfg = small_caps(mu, 2);
    cfg.residual_fail_threshold = 1e-3;
    const auto r = local_normal_form(sys, Vec{0.5, 0.0}, IntVec{1, 0}, T, mu, cfg);
    const auto H_mu = r.system.l + r.system.f_mu;
    const auto normal = r.scaled.l + r.scaled.g + r.scaled.remainder;
    double residual_sum = 0.0;
    for (const auto& e : r.scaled.ledger) residual_sum += e.residual;
    std::mt19937_64 gen(12);
    for (int s = 0; s < 20; ++s) {
        const PhasePoint x{{uniform(gen), uniform(gen)}, {uniform(gen, -0.5, 0.5), uniform(gen, -0.5, 0.5)}};
        const PhasePoint y = compose_generator_flows(r.scaled.generators, x);
        const double ref = evaluate(H_mu, y.theta, y.action);
        // Floor at double round-off of the evaluation itself.
        EXPECT_LE(std::abs(evaluate(normal, x.theta, x.action) - ref),
                  std::max(10.0 * residual_sum, 1e-14 * std::max(1.0, std::abs(ref))));
    }
}

TEST(Json, LedgerFields) {
    const auto l = FTPolynomial::linear(Vec{1.0, 0.0});
    const auto r = iterate_normal_form(l, model_perturbation(0.01), IntVec{1, 0}, 1.0, small_caps(0.01, 2));
    const auto j = to_json(r);
    ASSERT_EQ(j.at("ledger").size(), 3u);
    EXPECT_TRUE(j["ledger"][0].contains("f_norm_bound"));
    EXPECT_EQ(j.at("generators").size(), 2u);
}
