#include <benchmark/benchmark.h>

#include <cmath>

#include "nekh/algebra.hpp"
#include "nekh/diophantine.hpp"
#include "nekh/dynamics.hpp"
#include "nekh/evaluator.hpp"
#include "nekh/normalform.hpp"

namespace {

nekh::FTPolynomial perturbation(int n, int cap) {
    nekh::RegularityProfile prof;
    prof.fourier_cap = cap;
    prof.seed = 7;
    prof.target_eps = 1e-3;
    return nekh::synthesize_ck_perturbation(prof, n);
}

void BM_PoissonBracket(benchmark::State& state) {
    const auto f = perturbation(2, static_cast<int>(state.range(0)));
    const auto g = perturbation(2, 4);
    for (auto _ : state) benchmark::DoNotOptimize(nekh::poisson_bracket(f, g));
    state.counters["terms"] = static_cast<double>(f.size());
}
BENCHMARK(BM_PoissonBracket)->Arg(4)->Arg(8);

void BM_Evaluate(benchmark::State& state) {
    const auto f = perturbation(2, 8);
    const nekh::Vec th{0.1, 0.7}, I{0.3, -0.2};
    for (auto _ : state) benchmark::DoNotOptimize(nekh::evaluate(f, th, I));
}
BENCHMARK(BM_Evaluate);

void BM_EvaluatorGradient(benchmark::State& state) {
    const auto f = perturbation(2, 8);
    const nekh::HamiltonianEvaluator ev(f);
    auto ws = ev.make_workspace();
    const nekh::Vec th{0.1, 0.7}, I{0.3, -0.2};
    nekh::Vec dth(2), dI(2);
    for (auto _ : state) benchmark::DoNotOptimize(ev.gradient(th, I, dth, dI, ws));
}
BENCHMARK(BM_EvaluatorGradient);

void BM_ImplicitMidpointStep(benchmark::State& state) {
    nekh::Vec A{1, 0, 0, 1};
    const auto H = nekh::FTPolynomial::quadratic(2, A) + perturbation(2, static_cast<int>(state.range(0)));
    nekh::ImplicitMidpoint stepper(H);
    nekh::PhaseState s{{0.1, 0.2}, {0.3, 0.4}, 0.0};
    for (auto _ : state) {
        s = stepper.step(s, 0.01);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_ImplicitMidpointStep)->Arg(4)->Arg(8);

void BM_Dirichlet(benchmark::State& state) {
    const nekh::Vec omega{1.0, std::sqrt(2.0), std::sqrt(3.0)};
    const double Q = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(nekh::dirichlet_approx(omega, Q));
}
BENCHMARK(BM_Dirichlet)->Arg(100)->Arg(10000);

void BM_NormalFormStep(benchmark::State& state) {
    const nekh::IntVec p{1, 0};
    const nekh::Vec omega{1.0, 0.0};
    const auto l = nekh::FTPolynomial::linear(omega);
    const auto f = 0.1 * perturbation(2, 4);
    nekh::NormalFormConfig cfg;
    cfg.steps = 2;
    cfg.mu = 0.01;
    cfg.fourier_cap = 8;
    cfg.residual_fail_threshold = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(nekh::iterate_normal_form(l, f, p, 1.0, cfg));
}
BENCHMARK(BM_NormalFormStep);

}  // namespace
