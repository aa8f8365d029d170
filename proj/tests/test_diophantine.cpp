#include <gtest/gtest.h>

#include <cmath>

#include "nekh/diophantine.hpp"
#include "nekh/lattice.hpp"
#include "test_util.hpp"

using namespace nekh;
using nekh::testing::uniform;

namespace {

struct OracleBest {
    std::int64_t q = 0;
    double objective = 0.0;
};

/// Independent exhaustive scan in long double.
OracleBest oracle_scan(const Vec& omega, double Q, int j) {
    OracleBest best{0, 1e300};
    const auto q_max = static_cast<std::int64_t>(std::ceil(Q));
    for (std::int64_t q = 1; q <= q_max; ++q) {
        long double obj = 0.0L;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (static_cast<int>(i) == j) continue;
            const long double x = static_cast<long double>(q) * omega[i] / omega[j];
            obj = std::max(obj, std::fabs(x - std::round(x)));
        }
        if (static_cast<double>(obj) < best.objective - 1e-14) best = {q, static_cast<double>(obj)};
    }
    return best;
}

int largest_index(const Vec& w) {
    int j = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (std::abs(w[i]) > std::abs(w[j])) j = static_cast<int>(i);
    return j;
}

}  // namespace

TEST(Dirichlet, SqrtTwoExample) {
    const Vec w{1.0, std::sqrt(2.0)};
    const auto first = dirichlet_approx(w, 10.0, Normalizer::First);
    EXPECT_EQ(first.q, 5);
    EXPECT_EQ(first.p, (IntVec{5, 7}));
    EXPECT_NEAR(first.objective, std::abs(5 * std::sqrt(2.0) - 7), 1e-14);
    EXPECT_LE(first.objective, 0.1);

    // Normalizing by the largest component approximates 1/sqrt(2) instead: q = 7.
    const auto largest = dirichlet_approx(w, 10.0);
    EXPECT_EQ(largest.q, 7);
    EXPECT_EQ(largest.p, (IntVec{5, 7}));
    EXPECT_EQ(largest.normalizer, 1);
}

TEST(Dirichlet, ThreeDimensionalExample) {
    const Vec w{1.0, std::sqrt(2.0), std::sqrt(3.0)};
    const auto a = dirichlet_approx(w, 50.0);
    const auto o = oracle_scan(w, 50.0, 2);
    EXPECT_EQ(a.q, o.q);
    EXPECT_LE(a.objective, 1.0 / std::sqrt(50.0));
}

TEST(Dirichlet, PeriodicInputIsFixed) {
    const Vec w{0.6, -0.9, 1.5};  // T0 = 10/3 with p = (2, -3, 5)
    const auto a = dirichlet_approx(w, 20.0);
    EXPECT_EQ(a.p, (IntVec{2, -3, 5}));
    EXPECT_NEAR(a.T, 10.0 / 3.0, 1e-14);
    EXPECT_LE(a.approx_error, 1e-15);
}

TEST(Dirichlet, MinimalPeriodAndSign) {
    const auto a = dirichlet_approx(Vec{-2.0, -1.0}, 5.0);
    EXPECT_EQ(a.p, (IntVec{-2, -1}));
    EXPECT_NEAR(a.T, 1.0, 1e-15);
    const auto b = dirichlet_approx(Vec{2.0, 4.0}, 5.0);
    EXPECT_EQ(b.p, (IntVec{1, 2}));
    EXPECT_NEAR(b.T, 0.5, 1e-15);
    const auto c = dirichlet_approx(Vec{3.0, 6.0}, 5.0);
    EXPECT_EQ(gcd_all(c.p), 1);
    EXPECT_NEAR(c.T * c.omega_per[1], static_cast<double>(c.p[1]), 1e-14);
}

TEST(Dirichlet, ExhaustiveOracleAndBound) {
    std::mt19937_64 gen(2024);
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 50; ++trial) {
            Vec w(n);
            for (auto& x : w) x = uniform(gen, -2, 2);
            const double Q = 1.0 + uniform(gen, 0, 199);
            const auto a = dirichlet_approx(w, Q);
            const int j = largest_index(w);
            const auto o = oracle_scan(w, Q, j);
            EXPECT_EQ(a.q, o.q) << "n=" << n << " trial=" << trial;
            EXPECT_NEAR(a.objective, o.objective, 1e-12);
            EXPECT_LE(a.objective, dirichlet_bound(Q, n) * (1 + 1e-12));
            for (int i = 0; i < n; ++i) {
                const double x = a.T * a.omega_per[i];
                EXPECT_NEAR(x, std::round(x), 1e-12 * std::max(1.0, std::abs(x)));
            }
            EXPECT_EQ(gcd_all(a.p), 1);
        }
    }
}

TEST(Dirichlet, ErrorNonincreasingInQ) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec w{uniform(gen, 0.1, 1), uniform(gen, 0.1, 1), uniform(gen, 0.1, 1)};
        double prev = std::numeric_limits<double>::infinity();
        for (double Q = 1; Q <= 300; Q += 7) {
            const auto a = dirichlet_approx(w, Q);
            EXPECT_LE(a.approx_error, prev);
            prev = a.approx_error;
        }
    }
}

TEST(Dirichlet, Errors) {
    EXPECT_THROW(dirichlet_approx(Vec{1.0, 2.0}, 0.5), DomainError);
    EXPECT_THROW(dirichlet_approx(Vec{0.0, 0.0}, 5.0), DomainError);
    EXPECT_THROW(dirichlet_approx(Vec{}, 5.0), DimensionError);
}

TEST(PeriodBound, Examples) {
    EXPECT_EQ(period_bound_Q(1e-3, 1), 1.0);
    EXPECT_EQ(period_bound_Q(1e-3, 1, 2.5), 2.5);
    EXPECT_NEAR(period_bound_Q(1e-4, 2), 10.0, 1e-12);
    EXPECT_EQ(period_bound_Q(1.0, 3, 1.7), 1.7);
    EXPECT_THROW(period_bound_Q(0.0, 2), DomainError);
}

TEST(PeriodicAction, Examples) {
    Vec A{1, 0, 0, 1};
    const IntegrableModel iso(FTPolynomial::quadratic(2, A), 2.0);
    PeriodicOrbitApprox a;
    a.omega_per = {0.5, 0.7};
    a.T = 10.0;
    a.p = {5, 7};
    const auto s = periodic_action(iso, a, Vec{0.45, 0.75});
    EXPECT_EQ(*s.I_star, (Vec{0.5, 0.7}));
    EXPECT_NEAR(*s.action_error, 0.05, 1e-15);

    Vec B{1, 0, 0, 2};
    const IntegrableModel aniso(FTPolynomial::quadratic(2, B), 2.0);
    const auto t = periodic_action(aniso, a, Vec{0.5, 0.3});
    EXPECT_NEAR((*t.I_star)[0], 0.5, 1e-15);
    EXPECT_NEAR((*t.I_star)[1], 0.35, 1e-15);

    const auto per = dirichlet_approx(Vec{0.5, 0.25}, 10.0);
    const auto u = periodic_action(iso, per, Vec{0.5, 0.25});
    EXPECT_EQ(*u.action_error, 0.0);
}

TEST(ResonantDirichlet, CodimensionOneSkipsScan) {
    // Lambda = span{(1,-1,0)} in n = 3 has d = 2; span{(1,-1,0),(0,1,-1)} has d = 1.
    const ResonanceModule mod(3, {IntVec{1, -1, 0}, IntVec{0, 1, -1}});
    const auto a = resonant_dirichlet_approx(Vec{0.4, 0.4, 0.4}, mod, 5.0);
    EXPECT_TRUE(a.dirichlet_skipped);
    EXPECT_EQ(a.p, (IntVec{1, 1, 1}));
    EXPECT_NEAR(a.T, 2.5, 1e-15);
    EXPECT_LE(a.approx_error, 1e-15);
}

TEST(ResonantDirichlet, ResultStaysOnResonance) {
    std::mt19937_64 gen(6);
    const ResonanceModule mod(3, {IntVec{1, -1, 0}});
    for (int trial = 0; trial < 20; ++trial) {
        const double x = uniform(gen, 0.2, 1), z = uniform(gen, -1, 1);
        const Vec w{x, x, z};
        const auto a = resonant_dirichlet_approx(w, mod, 30.0);
        EXPECT_FALSE(a.dirichlet_skipped);
        EXPECT_EQ(dot(a.p, IntVec{1, -1, 0}), 0);
        EXPECT_NEAR(a.omega_per[0] - a.omega_per[1], 0.0, 1e-15);
        EXPECT_LE(a.objective, dirichlet_bound(30.0, 2) * (1 + 1e-12));
    }
}

TEST(Json, Fields) {
    const auto j = to_json(dirichlet_approx(Vec{1.0, std::sqrt(2.0)}, 10.0, Normalizer::First));
    EXPECT_EQ(j.at("q").get<int>(), 5);
    EXPECT_EQ(j.at("p").get<IntVec>(), (IntVec{5, 7}));
    EXPECT_TRUE(j.contains("T"));
    EXPECT_TRUE(j.contains("omega_per"));
    EXPECT_TRUE(j.contains("error"));
    EXPECT_FALSE(j.contains("I_star"));
}
