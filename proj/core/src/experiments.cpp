#include "nekh/experiments.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "nekh/csv.hpp"

namespace nekh {

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw DomainError("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : 0;
    den = g ? d / g : 1;
}

std::string Rational::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

Exponents theorem_exponents(int k_reg, int n, std::optional<int> d) {
    if (k_reg < 3) throw DomainError("theorem_exponents: k must be >= 3 (for k = 2 the estimate gives no time scale)");
    if (n < 1) throw DomainError("theorem_exponents: n must be >= 1");
    const int m = d.value_or(n);
    if (m < 1 || m > n) throw DomainError("theorem_exponents: d must satisfy 1 <= d <= n");
    return {Rational(k_reg - 2, 2 * m), Rational(1, 2 * m)};
}

std::uint64_t counter_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

// ---- configuration ----------------------------------------------------------

Exponents SweepConfig::exponents() const {
    const std::optional<int> d = lambda.empty() ? std::nullopt : std::optional<int>(n - static_cast<int>(lambda.size()));
    return theorem_exponents(k_reg, n, d);
}

double SweepConfig::horizon_for(double eps) const {
    if (!(eps > 0.0)) return horizon_cap;
    const double a = horizon_exponent.value_or(exponents().a.value());
    return std::min(horizon_cap, horizon_coeff * std::pow(eps, -a));
}

double SweepConfig::threshold_for(double eps) const {
    if (drift_abs) return *drift_abs;
    if (!(eps > 0.0)) return 0.0;
    return drift_coeff * std::pow(eps, drift_exponent.value_or(exponents().b.value()));
}

double SweepConfig::h_step_for(double eps) const {
    if (h_step_fixed) return *h_step_fixed;
    return eps > 0.0 ? std::min(h_step_max, std::sqrt(eps)) : h_step_max;
}

void SweepConfig::validate() const {
    if (n < 1 || n > kMaxDims) throw DomainError("sweep: n out of range");
    if (eps_grid.empty()) throw DomainError("sweep: empty eps grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] >= 0.0)) throw DomainError("sweep: eps must be >= 0");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw DomainError("sweep: eps grid must be strictly decreasing");
    }
    if (ensemble < 1) throw DomainError("sweep: ensemble must be >= 1");
    if (!(R > 0.0)) throw DomainError("sweep: R must be > 0");
    if (!(horizon_cap > 0.0)) throw DomainError("sweep: horizon_cap must be > 0");
    if (h_step_fixed && !(*h_step_fixed > 0.0)) throw DomainError("sweep: h_step must be > 0");
    if (!(h_step_max > 0.0)) throw DomainError("sweep: h_step_max must be > 0");
    if (!(initial_margin >= 0.0) || initial_margin >= R / 2) throw DomainError("sweep: initial_margin out of range");
    for (const auto& k : lambda)
        if (static_cast<int>(k.size()) != n) throw DomainError("sweep: lambda vector length mismatch");
    (void)exponents();
    // Initial actions lie within R/2 - margin of the center; the drift ball must stay in B_R.
    for (double e : eps_grid)
        if (!(threshold_for(e) >= 0.0) || threshold_for(e) > R / 2 + initial_margin)
            throw DomainError("sweep: drift threshold must lie in [0, R/2 + initial_margin]");
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    try {
        SweepConfig c;
        c.n = j.at("n").get<int>();
        c.k_reg = j.at("k_reg").get<int>();
        c.eps_grid = j.at("eps_grid").get<Vec>();
        c.ensemble = j.value("ensemble", 1);
        c.seed = j.value("seed", std::uint64_t{1});
        c.R = j.value("R", 1.0);
        if (j.contains("h")) c.h = j["h"];
        c.fourier_cap = j.value("fourier_cap", c.fourier_cap);
        c.action_degree = j.value("action_degree", c.action_degree);
        c.decay_exponent = j.value("decay_exponent", 0.0);
        if (j.contains("perturbation_seed") && !j["perturbation_seed"].is_null())
            c.perturbation_seed = j["perturbation_seed"].get<std::uint64_t>();
        c.horizon_cap = j.value("horizon_cap", c.horizon_cap);
        c.horizon_coeff = j.value("horizon_coeff", c.horizon_coeff);
        if (j.contains("horizon_exponent") && !j["horizon_exponent"].is_null())
            c.horizon_exponent = j["horizon_exponent"].get<double>();
        if (j.contains("drift_abs") && !j["drift_abs"].is_null()) c.drift_abs = j["drift_abs"].get<double>();
        c.drift_coeff = j.value("drift_coeff", c.drift_coeff);
        if (j.contains("drift_exponent") && !j["drift_exponent"].is_null())
            c.drift_exponent = j["drift_exponent"].get<double>();
        if (j.contains("h_step") && !j["h_step"].is_null()) c.h_step_fixed = j["h_step"].get<double>();
        c.h_step_max = j.value("h_step_max", c.h_step_max);
        c.initial_margin = j.value("initial_margin", 0.0);
        if (j.contains("lambda")) c.lambda = j["lambda"].get<std::vector<IntVec>>();
        c.sigma = j.value("sigma", 1.0);
        c.step_budget = j.value("step_budget", c.step_budget);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sweep config: ") + e.what());
    }
}

nlohmann::json to_json(const SweepConfig& c) {
    nlohmann::json j;
    j["n"] = c.n;
    j["k_reg"] = c.k_reg;
    j["eps_grid"] = c.eps_grid;
    j["ensemble"] = c.ensemble;
    j["seed"] = c.seed;
    j["R"] = c.R;
    j["h"] = c.h;
    j["fourier_cap"] = c.fourier_cap;
    j["action_degree"] = c.action_degree;
    j["decay_exponent"] = c.decay_exponent;
    j["perturbation_seed"] = c.perturbation_seed ? nlohmann::json(*c.perturbation_seed) : nlohmann::json(nullptr);
    j["horizon_cap"] = c.horizon_cap;
    j["horizon_coeff"] = c.horizon_coeff;
    j["horizon_exponent"] = c.horizon_exponent ? nlohmann::json(*c.horizon_exponent) : nlohmann::json(nullptr);
    j["drift_abs"] = c.drift_abs ? nlohmann::json(*c.drift_abs) : nlohmann::json(nullptr);
    j["drift_coeff"] = c.drift_coeff;
    j["drift_exponent"] = c.drift_exponent ? nlohmann::json(*c.drift_exponent) : nlohmann::json(nullptr);
    j["h_step"] = c.h_step_fixed ? nlohmann::json(*c.h_step_fixed) : nlohmann::json(nullptr);
    j["h_step_max"] = c.h_step_max;
    j["initial_margin"] = c.initial_margin;
    j["lambda"] = c.lambda;
    j["sigma"] = c.sigma;
    j["step_budget"] = c.step_budget;
    return j;
}

// ---- sweep ------------------------------------------------------------------

NearIntegrableSystem sweep_system(const SweepConfig& cfg, double eps) {
    nlohmann::json sys;
    sys["n"] = cfg.n;
    sys["R"] = cfg.R;
    sys["k_reg"] = cfg.k_reg;
    if (!cfg.h.is_null()) sys["h"] = cfg.h;
    sys["f"] = {{"type", "synthesized"},
                {"eps", eps},
                {"seed", cfg.perturbation_seed.value_or(cfg.seed)},
                {"fourier_cap", cfg.fourier_cap},
                {"k_reg", cfg.k_reg},
                {"decay_exponent", cfg.decay_exponent},
                {"action_degree", cfg.action_degree}};
    return system_from_json(sys);
}

namespace {

double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

PhaseState sweep_initial_state(const SweepConfig& cfg, const NearIntegrableSystem& system, int eps_index,
                               int ensemble_idx) {
    std::mt19937_64 gen(counter_seed(cfg.seed, static_cast<std::uint64_t>(eps_index),
                                     static_cast<std::uint64_t>(ensemble_idx)));
    const int n = cfg.n;
    const Vec& c = system.h.center();
    const double r = cfg.R / 2 - cfg.initial_margin;
    PhaseState s;
    s.action.resize(n);
    s.theta.resize(n);
    for (int j = 0; j < n; ++j) s.action[j] = c[j] + r * (2.0 * unit_uniform(gen) - 1.0);
    for (int j = 0; j < n; ++j) s.theta[j] = unit_uniform(gen);
    if (!cfg.lambda.empty()) {
        const ResonanceModule module(n, cfg.lambda);
        const ResonanceDistance rd = resonance_distance(system.model(), s.action, module);
        const double spread = cfg.sigma * std::sqrt(cfg.eps_grid[eps_index]) / std::sqrt(static_cast<double>(n));
        for (int j = 0; j < n; ++j) s.action[j] = rd.nearest[j] + spread * (2.0 * unit_uniform(gen) - 1.0);
    }
    return s;
}

SweepResult run_sweep(const SweepConfig& cfg, int threads) {
    cfg.validate();
    SweepResult out;
    const int n_eps = static_cast<int>(cfg.eps_grid.size());
    std::vector<NearIntegrableSystem> systems;
    double total_steps = 0.0;
    for (double eps : cfg.eps_grid) {
        systems.push_back(sweep_system(cfg, eps));
        total_steps += cfg.ensemble * std::ceil(cfg.horizon_for(eps) / cfg.h_step_for(eps));
    }
    if (total_steps > cfg.step_budget)
        out.warnings.push_back("sweep: estimated " + std::to_string(total_steps) + " steps exceeds the budget of " +
                               std::to_string(cfg.step_budget));

    const std::size_t tasks = static_cast<std::size_t>(n_eps) * static_cast<std::size_t>(cfg.ensemble);
    out.records.resize(tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            const int e = static_cast<int>(t / cfg.ensemble);
            const int i = static_cast<int>(t % cfg.ensemble);
            const double eps = cfg.eps_grid[e];
            StabilityRecord& rec = out.records[t];
            rec.eps_index = e;
            rec.eps = eps;
            rec.ensemble_idx = i;
            const PhaseState s0 = sweep_initial_state(cfg, systems[e], e, i);
            rec.initial_action = s0.action;
            IntegrateOptions opt;
            opt.horizon = cfg.horizon_for(eps);
            opt.h_step = cfg.h_step_for(eps);
            opt.drift_threshold = cfg.threshold_for(eps);
            try {
                const TrajectoryRecord tr = integrate(systems[e], s0, opt);
                rec.exit_time = tr.exit_time;
                rec.exit_kind = tr.exit_kind;
                rec.max_drift = tr.max_drift;
                rec.energy_drift = tr.energy_drift;
                rec.steps = tr.steps;
            } catch (const Error&) {
                rec.exit_kind = ExitKind::Failure;
            }
        }
    };
    int nthreads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(nthreads), tasks));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<StabilityRecord>& records) {
    os << "eps,ensemble_idx,exit_time,exit_kind,max_drift,energy_drift,steps\n";
    for (const auto& r : records)
        os << format_double(r.eps) << ',' << r.ensemble_idx << ',' << format_double(r.exit_time) << ','
           << to_string(r.exit_kind) << ',' << format_double(r.max_drift) << ',' << format_double(r.energy_drift)
           << ',' << r.steps << '\n';
}

std::vector<StabilityRecord> read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("eps,ensemble_idx", 0) != 0)
        throw ParseError("sweep csv: missing header");
    std::vector<StabilityRecord> out;
    std::map<double, int> index;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 7) throw ParseError("sweep csv: row " + std::to_string(row) + " has the wrong width");
        try {
            StabilityRecord r;
            r.eps = std::stod(cells[0]);
            r.ensemble_idx = std::stoi(cells[1]);
            r.exit_time = std::stod(cells[2]);
            r.exit_kind = exit_kind_from_string(cells[3]);
            r.max_drift = std::stod(cells[4]);
            r.energy_drift = std::stod(cells[5]);
            r.steps = std::stoll(cells[6]);
            auto [it, inserted] = index.emplace(r.eps, static_cast<int>(index.size()));
            r.eps_index = it->second;
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("sweep csv: bad number in row " + std::to_string(row));
        }
    }
    return out;
}

// ---- fitting ----------------------------------------------------------------

FitQuantity fit_quantity_from_string(const std::string& s) {
    if (s == "exit_time") return FitQuantity::ExitTime;
    if (s == "max_drift") return FitQuantity::MaxDrift;
    throw ParseError("unknown fit quantity '" + s + "'");
}

FitResult least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("least_squares: need >= 2 matching points");
    const double m = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("least_squares: degenerate abscissae");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        fit.residuals.push_back(r);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.log_eps.assign(x.begin(), x.end());
    fit.log_quantity.assign(y.begin(), y.end());
    return fit;
}

FitResult fit_exponent(const std::vector<StabilityRecord>& records, FitQuantity quantity) {
    std::map<double, double> agg;  // eps -> aggregated quantity
    for (const auto& r : records) {
        if (!(r.eps > 0.0)) continue;
        if (r.exit_kind == ExitKind::Failure) continue;
        if (quantity == FitQuantity::ExitTime) {
            if (r.exit_kind != ExitKind::Drift) continue;
            auto [it, inserted] = agg.emplace(r.eps, r.exit_time);
            if (!inserted) it->second = std::min(it->second, r.exit_time);
        } else {
            if (!(r.max_drift > 0.0)) continue;
            auto [it, inserted] = agg.emplace(r.eps, r.max_drift);
            if (!inserted) it->second = std::max(it->second, r.max_drift);
        }
    }
    Vec x, y;
    for (const auto& [eps, q] : agg) {
        x.push_back(std::log(eps));
        y.push_back(std::log(q));
    }
    FitResult fit;
    if (x.size() < 3) {
        fit.censored = true;
        fit.log_eps = x;
        fit.log_quantity = y;
    } else {
        fit = least_squares(x, y);
    }
    if (!agg.empty()) {
        fit.eps_min = agg.begin()->first;
        fit.eps_max = agg.rbegin()->first;
    }
    return fit;
}

nlohmann::json to_json(const FitResult& fit) {
    nlohmann::json j;
    if (fit.censored) {
        j["censored"] = true;
        j["slope"] = nullptr;
        j["intercept"] = nullptr;
        j["r2"] = nullptr;
    } else {
        j["slope"] = fit.slope;
        j["intercept"] = fit.intercept;
        j["r2"] = fit.r2;
        j["residuals"] = fit.residuals;
    }
    j["target_exponent"] = fit.target_exponent ? nlohmann::json(*fit.target_exponent) : nlohmann::json(nullptr);
    j["eps_range"] = {fit.eps_min, fit.eps_max};
    j["points"] = fit.log_eps.size();
    return j;
}

void write_plot_tsv(std::ostream& os, const FitResult& fit) {
    os << "log10_eps\tlog10_quantity\n";
    const double k = 1.0 / std::log(10.0);
    for (std::size_t i = 0; i < fit.log_eps.size(); ++i)
        os << format_double(fit.log_eps[i] * k) << '\t' << format_double(fit.log_quantity[i] * k) << '\n';
}

}  // namespace nekh
