#include <gtest/gtest.h>

#include <cmath>

#include "nekh/algebra.hpp"
#include "nekh/evaluator.hpp"
#include "test_util.hpp"

using namespace nekh;
using nekh::testing::oracle_evaluate;
using nekh::testing::random_polynomial;
using nekh::testing::uniform;

namespace {

const IntVec e1{1, 0};
const IntVec zero2{0, 0};

FTPolynomial cos_theta1() { return FTPolynomial::cosine(2, e1, 1.0); }

FTPolynomial half_norm_squared(int n) {
    Vec A(n * n, 0.0);
    for (int i = 0; i < n; ++i) A[i * n + i] = 1.0;
    return FTPolynomial::quadratic(n, A);
}

}  // namespace

TEST(Evaluate, ConstantIsOne) {
    const auto p = FTPolynomial::constant(3, 1.0);
    EXPECT_EQ(evaluate(p, Vec{0.3, 0.1, 0.9}, Vec{5, -2, 1}), 1.0);
}

TEST(Evaluate, HalfNormSquared) {
    EXPECT_DOUBLE_EQ(evaluate(half_norm_squared(2), Vec{0.2, 0.4}, Vec{1, 1}), 1.0);
}

TEST(Evaluate, CosineAtQuarterPeriodVanishes) {
    const auto p = cos_theta1();
    EXPECT_EQ(p.coefficient(e1, zero2), FTPolynomial::Coefficient(0.5, 0.0));
    EXPECT_NEAR(evaluate(p, Vec{0.25, 0.0}, Vec{0, 0}), 0.0, 1e-15);
}

TEST(Evaluate, AnglesTakenModOne) {
    const auto p = cos_theta1() + FTPolynomial::cosine(2, IntVec{1, 2}, 0.3, 0.4);
    EXPECT_NEAR(evaluate(p, Vec{0.1, 0.3}, Vec{0, 0}), evaluate(p, Vec{3.1, -1.7}, Vec{0, 0}), 1e-13);
}

TEST(Evaluate, DimensionMismatchThrows) {
    EXPECT_THROW(evaluate(cos_theta1(), Vec{0.1}, Vec{0, 0}), DimensionError);
}

TEST(Evaluate, MatchesTermwiseOracle) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 3;
        Vec center(n);
        for (auto& c : center) c = uniform(gen, -0.5, 0.5);
        const auto p = random_polynomial(gen, n, 6, 3, 20, 1.0, center);
        const HamiltonianEvaluator ev(p);
        for (int s = 0; s < 10; ++s) {
            Vec th(n), I(n);
            for (int j = 0; j < n; ++j) {
                th[j] = uniform(gen);
                I[j] = uniform(gen, -1, 1);
            }
            const double ref = oracle_evaluate(p, th, I);
            const double scale = std::max(1.0, std::abs(ref));
            EXPECT_NEAR(evaluate(p, th, I), ref, 1e-13 * scale * 10);
            EXPECT_NEAR(ev.value(th, I), ref, 1e-13 * scale * 10);
        }
    }
}

TEST(Evaluator, GradientMatchesAlgebraicDerivatives) {
    std::mt19937_64 gen(5);
    const auto p = random_polynomial(gen, 3, 5, 3, 25);
    const HamiltonianEvaluator ev(p);
    auto ws = ev.make_workspace();
    const Vec th{0.12, 0.53, 0.77}, I{0.3, -0.4, 0.2};
    Vec dth(3), dI(3);
    const double v = ev.gradient(th, I, dth, dI, ws);
    EXPECT_NEAR(v, evaluate(p, th, I), 1e-12);
    for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(dth[j], evaluate(derivative_angle(p, j), th, I), 1e-11);
        EXPECT_NEAR(dI[j], evaluate(derivative_action(p, j), th, I), 1e-11);
    }
}

TEST(Reality, FromTermsRejectsNonRealMaps) {
    FTPolynomial::TermMap terms;
    terms.emplace(MonomialKey::make(e1, zero2), FTPolynomial::Coefficient(0.5, 0.1));
    EXPECT_THROW(FTPolynomial::from_terms(2, {}, terms), DomainError);
    terms.emplace(MonomialKey::make(IntVec{-1, 0}, zero2), FTPolynomial::Coefficient(0.5, -0.1));
    EXPECT_NO_THROW(FTPolynomial::from_terms(2, {}, terms));
}

TEST(Reality, OperationsKeepConjugatePairs) {
    std::mt19937_64 gen(3);
    const auto f = random_polynomial(gen, 2, 4, 2, 10);
    const auto g = random_polynomial(gen, 2, 4, 2, 10);
    for (const auto& p : {f + g, multiply(f, g), poisson_bracket(f, g), compose_linear_flow(f, Vec{0.3, 0.7}, 1.3)}) {
        for (const auto& [key, c] : p.terms()) {
            if (key.is_resonant_free()) {
                EXPECT_EQ(c.imag(), 0.0);
            } else {
                auto it = p.terms().find(key.conjugate());
                ASSERT_NE(it, p.terms().end());
                EXPECT_EQ(it->second, std::conj(c));
            }
            EXPECT_NE(c, FTPolynomial::Coefficient{});
        }
    }
}

TEST(PoissonBracket, SelfBracketIsZero) {
    std::mt19937_64 gen(1);
    const auto f = random_polynomial(gen, 2, 5, 3, 15);
    EXPECT_LE(max_abs_coefficient(poisson_bracket(f, f)), 1e-12 * nekh::testing::coefficient_scale(f));
}

TEST(PoissonBracket, ActionWithCosine) {
    // {I_1, cos 2 pi theta_1} = d_I I_1 . d_theta cos = -2 pi sin(2 pi theta_1).
    const auto f = FTPolynomial::action_monomial(2, e1, 1.0);
    const auto b = poisson_bracket(f, cos_theta1());
    for (double t : {0.0, 0.1, 0.25, 0.6}) {
        const Vec th{t, 0.3}, I{0.2, 0.1};
        EXPECT_NEAR(evaluate(b, th, I), -kTwoPi * std::sin(kTwoPi * t), 1e-13);
    }
}

TEST(PoissonBracket, MatchesFiniteDifferences) {
    std::mt19937_64 gen(21);
    const auto f = random_polynomial(gen, 2, 3, 2, 6);
    const auto g = random_polynomial(gen, 2, 3, 2, 6);
    const auto b = poisson_bracket(f, g);
    const double h = 1e-6;
    for (int s = 0; s < 20; ++s) {
        const Vec th{uniform(gen), uniform(gen)}, I{uniform(gen, -1, 1), uniform(gen, -1, 1)};
        auto d = [&](const FTPolynomial& p, bool angle, int j) {
            Vec tp = th, tm = th, ip = I, im = I;
            if (angle) {
                tp[j] += h;
                tm[j] -= h;
            } else {
                ip[j] += h;
                im[j] -= h;
            }
            return (evaluate(p, tp, ip) - evaluate(p, tm, im)) / (2 * h);
        };
        double fd = 0.0;
        for (int j = 0; j < 2; ++j) fd += d(f, false, j) * d(g, true, j) - d(f, true, j) * d(g, false, j);
        EXPECT_NEAR(evaluate(b, th, I), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST(PoissonBracket, ResonantModesCommuteWithLinearFlow) {
    const Vec omega{1.0, 2.0};
    const auto l = FTPolynomial::linear(omega);
    FTPolynomial g(2);
    g.add_mode(IntVec{2, -1}, IntVec{1, 0}, {0.3, 0.2});
    g.add_mode(IntVec{4, -2}, IntVec{0, 2}, {-0.1, 0.5});
    g.add_mode(zero2, IntVec{1, 1}, 0.7);
    EXPECT_TRUE(poisson_bracket(l, g).is_zero());
}

TEST(PoissonBracket, CenterMismatchThrows) {
    const auto a = FTPolynomial::action_monomial(2, e1, 1.0, Vec{0, 0});
    const auto b = FTPolynomial::action_monomial(2, e1, 1.0, Vec{0.1, 0});
    EXPECT_THROW(poisson_bracket(a, b), Error);
}

TEST(PoissonBracket, JacobiIdentity) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 2;
        const auto f = random_polynomial(gen, n, 3, 2, 5);
        const auto g = random_polynomial(gen, n, 3, 2, 5);
        const auto h = random_polynomial(gen, n, 3, 2, 5);
        const auto jac = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) +
                         poisson_bracket(h, poisson_bracket(f, g));
        const double scale = nekh::testing::coefficient_scale(poisson_bracket(f, poisson_bracket(g, h)));
        EXPECT_LE(max_abs_coefficient(jac), 1e-12 * scale);
    }
}

TEST(PoissonBracket, LeibnizRule) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_polynomial(gen, 2, 3, 2, 5);
        const auto g = random_polynomial(gen, 2, 3, 2, 5);
        const auto h = random_polynomial(gen, 2, 3, 2, 5);
        const auto lhs = poisson_bracket(f, multiply(g, h));
        const auto rhs = multiply(poisson_bracket(f, g), h) + multiply(g, poisson_bracket(f, h));
        EXPECT_LE(max_coefficient_difference(lhs, rhs), 1e-12 * nekh::testing::coefficient_scale(lhs));
    }
}

TEST(LinearFlow, ZeroTimeIsIdentity) {
    std::mt19937_64 gen(2);
    const auto p = random_polynomial(gen, 2, 5, 2, 10);
    EXPECT_EQ(compose_linear_flow(p, Vec{0.3, 1.1}, 0.0), p);
}

TEST(LinearFlow, QuarterPeriodTurnsCosineIntoMinusSine) {
    const auto q = compose_linear_flow(cos_theta1(), Vec{1.0, 0.0}, 0.25);
    for (double t : {0.0, 0.13, 0.4, 0.77}) EXPECT_NEAR(evaluate(q, Vec{t, 0.2}, Vec{0, 0}), -std::sin(kTwoPi * t), 1e-15);
}

TEST(LinearFlow, GroupProperty) {
    std::mt19937_64 gen(4);
    const auto p = random_polynomial(gen, 3, 5, 2, 12);
    const Vec w{0.3, -1.2, 0.77};
    const auto back = compose_linear_flow(compose_linear_flow(p, w, 0.8), w, -0.8);
    EXPECT_LE(max_coefficient_difference(back, p), 1e-15 * 4 * nekh::testing::coefficient_scale(p));
    const auto two = compose_linear_flow(compose_linear_flow(p, w, 0.3), w, 0.45);
    EXPECT_LE(max_coefficient_difference(two, compose_linear_flow(p, w, 0.75)), 1e-14);
}

TEST(Recenter, PreservesValues) {
    std::mt19937_64 gen(9);
    const auto p = random_polynomial(gen, 2, 3, 4, 12, 1.0, Vec{0.1, -0.2});
    const auto q = recenter(p, Vec{0.4, 0.3});
    EXPECT_EQ(q.center(), (Vec{0.4, 0.3}));
    for (int s = 0; s < 10; ++s) {
        const Vec th{uniform(gen), uniform(gen)}, I{uniform(gen, -1, 1), uniform(gen, -1, 1)};
        EXPECT_NEAR(evaluate(q, th, I), evaluate(p, th, I), 1e-12);
    }
}

TEST(ScaleActions, ComposesWithAffineMap) {
    std::mt19937_64 gen(10);
    const auto p = random_polynomial(gen, 2, 3, 3, 10, 1.0, Vec{0.2, 0.1});
    const auto q = scale_actions(p, 0.05);
    const Vec th{0.3, 0.8}, J{0.7, -0.4};
    const Vec I{0.2 + 0.05 * J[0], 0.1 + 0.05 * J[1]};
    EXPECT_NEAR(evaluate(q, th, J), evaluate(p, th, I), 1e-13);
}

TEST(Truncate, DroppedBoundCoversDroppedTerms) {
    std::mt19937_64 gen(12);
    const auto p = random_polynomial(gen, 2, 6, 3, 20);
    Truncation caps;
    caps.fourier_cap = 3;
    caps.degree_cap = 1;
    caps.norm_order = 0;
    const Truncated t = truncate(p, caps);
    for (const auto& [key, c] : t.value.terms()) EXPECT_TRUE(caps.keeps(key));
    EXPECT_NEAR(t.dropped_bound, ck_norm_upper_bound(p - t.value, 0, 1.0), 1e-12);
}

TEST(NormBound, Examples) {
    EXPECT_EQ(ck_norm_upper_bound(FTPolynomial(2), 3, 1.0), 0.0);
    EXPECT_NEAR(ck_norm_upper_bound(cos_theta1(), 1, 1.0), kTwoPi, 1e-14);
    EXPECT_EQ(ck_norm_upper_bound(FTPolynomial::action_monomial(2, e1, 1.0), 0, 1.0), 1.0);
}

TEST(NormBound, DominatesSampledDerivatives) {
    // Exact derivatives (algebraic) up to order k sampled at 1000 points.
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        RegularityProfile prof;
        prof.k_reg = 2;
        prof.fourier_cap = 5;
        prof.seed = seed;
        prof.target_eps = 1e-2;
        prof.action_degree = 2;
        const auto f = synthesize_ck_perturbation(prof, 2);
        const double bound = ck_norm_upper_bound(f, prof.k_reg, prof.radius);
        std::vector<FTPolynomial> derivs{f};
        std::vector<FTPolynomial> frontier{f};
        for (int order = 1; order <= prof.k_reg; ++order) {
            std::vector<FTPolynomial> next;
            for (const auto& p : frontier)
                for (int j = 0; j < 2; ++j) {
                    next.push_back(derivative_angle(p, j));
                    next.push_back(derivative_action(p, j));
                }
            derivs.insert(derivs.end(), next.begin(), next.end());
            frontier = std::move(next);
        }
        std::mt19937_64 gen(seed);
        double sup = 0.0;
        for (int s = 0; s < 1000; ++s) {
            const Vec th{uniform(gen), uniform(gen)}, I{uniform(gen, -1, 1), uniform(gen, -1, 1)};
            for (const auto& d : derivs) sup = std::max(sup, std::abs(evaluate(d, th, I)));
        }
        EXPECT_LE(sup, bound);
        EXPECT_GT(sup, 0.0);
    }
}

TEST(Synthesis, ZeroTargetGivesZero) {
    RegularityProfile prof;
    prof.target_eps = 0.0;
    EXPECT_TRUE(synthesize_ck_perturbation(prof, 2).is_zero());
    prof.target_eps = -1.0;
    EXPECT_THROW(synthesize_ck_perturbation(prof, 2), DomainError);
}

TEST(Synthesis, DeterministicGivenSeed) {
    RegularityProfile prof;
    prof.seed = 99;
    EXPECT_EQ(synthesize_ck_perturbation(prof, 2), synthesize_ck_perturbation(prof, 2));
    RegularityProfile other = prof;
    other.seed = 100;
    EXPECT_NE(synthesize_ck_perturbation(prof, 2), synthesize_ck_perturbation(other, 2));
}

TEST(Synthesis, NormEqualsTarget) {
    RegularityProfile prof;
    prof.k_reg = 4;
    prof.target_eps = 3e-4;
    prof.radius = 0.7;
    const auto f = synthesize_ck_perturbation(prof, 3);
    EXPECT_NEAR(ck_norm_upper_bound(f, 4, 0.7), 3e-4, 3e-4 * 1e-13);
}

TEST(Synthesis, DecayLaw) {
    RegularityProfile prof;
    prof.k_reg = 3;
    prof.fourier_cap = 8;
    const auto f = synthesize_ck_perturbation(prof, 2);
    const double c8 = std::abs(f.coefficient(IntVec{8, 0}, zero2));
    const double c1 = std::abs(f.coefficient(IntVec{1, 0}, zero2));
    EXPECT_NEAR(c8 / c1, std::pow(9.0 / 2.0, -6.0), 1e-12 * std::pow(9.0 / 2.0, -6.0));
    EXPECT_EQ(f.max_mode_l1(), 8);
}

TEST(Json, RoundTripIsBitExact) {
    std::mt19937_64 gen(13);
    const auto p = random_polynomial(gen, 3, 4, 2, 15, 1.0, Vec{0.1, 1.0 / 3.0, -0.7});
    const auto q = polynomial_from_json(nlohmann::json::parse(to_json(p).dump()));
    EXPECT_EQ(p, q);
}

TEST(Json, MalformedInputThrowsParseError) {
    EXPECT_THROW(polynomial_from_json(nlohmann::json{{"n", 2}}), ParseError);
    auto j = to_json(cos_theta1());
    j["terms"][0]["im"] = 0.25;
    EXPECT_THROW(polynomial_from_json(j), ParseError);
}
