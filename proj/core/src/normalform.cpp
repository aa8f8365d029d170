#include "nekh/normalform.hpp"

#include <cmath>

namespace nekh {

namespace {

std::int64_t mode_dot(const MonomialKey& key, std::span<const std::int64_t> p) {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < p.size(); ++j) s += static_cast<std::int64_t>(key.mode(static_cast<int>(j))) * p[j];
    return s;
}

void check_period(const FTPolynomial& f, std::span<const std::int64_t> p, double T, const char* op) {
    if (static_cast<int>(p.size()) != f.dims()) throw DimensionError(std::string(op) + ": p has the wrong length");
    if (!(T > 0.0)) throw DomainError(std::string(op) + ": T must be > 0");
}

// c mu^{|alpha| - 1} for every term, re-expanded around the origin: the
// coefficient map of mu^{-1} p(Ic + mu J).
FTPolynomial scale_terms(const FTPolynomial& p, double mu) {
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : p.terms()) {
        const int d = key.degree();
        double s = d == 0 ? 1.0 / mu : 1.0;
        for (int i = 1; i < d; ++i) s *= mu;
        terms.emplace(key, c * s);
    }
    return FTPolynomial::from_terms(p.dims(), Vec(p.dims(), 0.0), std::move(terms));
}

FTPolynomial select_degree(const FTPolynomial& p, int lo, int hi) {
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : p.terms())
        if (key.degree() >= lo && key.degree() <= hi) terms.emplace(key, c);
    return FTPolynomial::from_terms(p.dims(), p.center(), std::move(terms));
}

}  // namespace

bool is_resonant(const FTPolynomial& g, std::span<const std::int64_t> p) {
    if (static_cast<int>(p.size()) != g.dims()) throw DimensionError("is_resonant: p has the wrong length");
    for (const auto& [key, c] : g.terms())
        if (mode_dot(key, p) != 0) return false;
    return true;
}

FTPolynomial average_along_periodic_flow(const FTPolynomial& f, std::span<const std::int64_t> p, double T) {
    check_period(f, p, T, "average_along_periodic_flow");
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : f.terms())
        if (mode_dot(key, p) == 0) terms.emplace(key, c);
    return FTPolynomial::from_terms(f.dims(), f.center(), std::move(terms));
}

FTPolynomial homological_generator(const FTPolynomial& f, std::span<const std::int64_t> p, double T) {
    check_period(f, p, T, "homological_generator");
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : f.terms()) {
        const std::int64_t m = mode_dot(key, p);
        if (m == 0) continue;
        terms.emplace(key, c * T / FTPolynomial::Coefficient(0.0, kTwoPi * static_cast<double>(m)));
    }
    return FTPolynomial::from_terms(f.dims(), f.center(), std::move(terms));
}

LieTransformResult lie_transform(const FTPolynomial& H, const FTPolynomial& chi, const NormalFormConfig& cfg,
                                 double radius) {
    if (cfg.lie_order < 2) throw DomainError("lie_transform: lie_order must be >= 2");
    const Truncation caps = cfg.caps(radius);
    Truncated start = truncate(H, caps);
    LieTransformResult out{std::move(start.value)};
    out.cap_dropped = start.dropped_bound;
    if (chi.is_zero()) {
        out.residual = out.cap_dropped;
        return out;
    }
    FTPolynomial term = out.value;
    double prev_norm = ck_norm_upper_bound(term, cfg.norm_order, radius);
    double last_norm = prev_norm;
    for (int m = 1; m <= cfg.lie_order; ++m) {
        Truncated br = poisson_bracket(chi, term, caps);
        const double inv = 1.0 / m;
        term = inv * br.value;
        out.cap_dropped += inv * br.dropped_bound;
        out.value = out.value + term;
        prev_norm = last_norm;
        last_norm = ck_norm_upper_bound(term, cfg.norm_order, radius);
        if (term.is_zero()) break;
    }
    if (last_norm > 0.0) {
        const double q = prev_norm > 0.0 ? last_norm / prev_norm : 1.0;
        out.series_tail = q < 1.0 ? last_norm * q / (1.0 - q) : std::numeric_limits<double>::infinity();
    }
    out.residual = out.series_tail + out.cap_dropped;
    if (!(out.residual <= cfg.residual_fail_threshold))
        throw TruncationError("lie_transform: residual bound " + std::to_string(out.residual) +
                              " exceeds threshold " + std::to_string(cfg.residual_fail_threshold));
    return out;
}

LieTransformResult lie_transform(const FTPolynomial& H, const FTPolynomial& chi, const NormalFormConfig& cfg) {
    return lie_transform(H, chi, cfg, cfg.rho);
}

NormalFormResult iterate_normal_form(const FTPolynomial& l, const FTPolynomial& f, std::span<const std::int64_t> p,
                                     double T, const NormalFormConfig& cfg) {
    check_period(f, p, T, "iterate_normal_form");
    if (l.dims() != f.dims() || l.center() != f.center())
        throw DimensionError("iterate_normal_form: l and f must share dims and center");
    if (cfg.steps < 0) throw DomainError("iterate_normal_form: steps must be >= 0");
    if (!(cfg.mu > 0.0)) throw DomainError("iterate_normal_form: mu must be > 0");
    if (T * cfg.mu > cfg.c3) throw ConditionError("T mu <= c3", T * cfg.mu, cfg.c3);

    NormalFormResult out{{}, l, FTPolynomial(f.dims(), f.center()), f, {}, {}, 0.0, {}};
    out.p.assign(p.begin(), p.end());
    out.T = T;
    for (auto v : p) out.omega_per.push_back(static_cast<double>(v) / T);

    for (int j = 0; j < cfg.steps; ++j) {
        const double rho_j = cfg.radius_at(j);
        const FTPolynomial& fj = out.remainder;
        const FTPolynomial avg = average_along_periodic_flow(fj, p, T);
        FTPolynomial chi = homological_generator(fj, p, T);

        LedgerEntry row;
        row.step = j;
        row.radius = rho_j;
        row.f_norm_bound = ck_norm_upper_bound(fj, cfg.norm_order, rho_j);
        row.g_norm_bound = ck_norm_upper_bound(out.g, cfg.norm_order, rho_j);
        row.chi_norm_bound = ck_norm_upper_bound(chi, cfg.norm_order, rho_j);
        row.homological_defect = max_coefficient_difference(poisson_bracket(chi, l), avg - fj);

        const LieTransformResult lt = lie_transform(l + out.g + fj, chi, cfg, rho_j);
        row.residual = lt.residual;
        out.ledger.push_back(row);

        out.g = out.g + avg;
        out.remainder = lt.value - l - out.g;
        out.generators.push_back(std::move(chi));
    }
    LedgerEntry last;
    last.step = cfg.steps;
    last.radius = cfg.radius_at(cfg.steps);
    last.f_norm_bound = ck_norm_upper_bound(out.remainder, cfg.norm_order, last.radius);
    last.g_norm_bound = ck_norm_upper_bound(out.g, cfg.norm_order, last.radius);
    out.ledger.push_back(last);

    if (!is_resonant(out.g, p)) throw Error("iterate_normal_form: resonant part has a non-resonant mode");
    return out;
}

ScaledSystem rescale_system(const NearIntegrableSystem& system, std::span<const double> I_star, double mu,
                            std::span<const double> omega_per) {
    const int n = system.dims();
    if (static_cast<int>(I_star.size()) != n || static_cast<int>(omega_per.size()) != n)
        throw DimensionError("rescale_system: dimension mismatch");
    if (!(mu > 0.0)) throw DomainError("rescale_system: mu must be > 0");
    double offset = 0.0;
    for (int j = 0; j < n; ++j) offset = std::max(offset, std::abs(I_star[j] - system.h.center()[j]));
    if (offset + 2.0 * mu > system.R) throw ConditionError("B(I_*, 2 mu) inside B_R", offset + 2.0 * mu, system.R);

    ScaledSystem s{FTPolynomial::linear(omega_per), FTPolynomial(n), FTPolynomial(n), FTPolynomial(n), 0.0, {}, 0.0, {}};
    s.I_star.assign(I_star.begin(), I_star.end());
    s.omega_per.assign(omega_per.begin(), omega_per.end());
    s.mu = mu;

    const FTPolynomial hc = recenter(system.h, I_star);
    const FTPolynomial h_scaled = scale_terms(hc, mu);
    s.constant = evaluate(select_degree(h_scaled, 0, 0), Vec(n, 0.0), Vec(n, 0.0));
    s.mu_h_mu = select_degree(h_scaled, 2, std::numeric_limits<int>::max());
    const FTPolynomial linear_part = select_degree(h_scaled, 1, 1);  // grad h(I_*).J
    s.f_scaled = scale_terms(recenter(system.f, I_star), mu);
    s.f_mu = s.mu_h_mu + s.f_scaled + (linear_part - s.l);
    return s;
}

ScaledSystem rescale_system(const NearIntegrableSystem& system, std::span<const double> I_star, double mu) {
    const Vec omega = system.model().gradient(I_star);
    return rescale_system(system, I_star, mu, omega);
}

FTPolynomial unscale(const FTPolynomial& p_scaled, std::span<const double> I_star, double mu) {
    if (static_cast<int>(I_star.size()) != p_scaled.dims()) throw DimensionError("unscale: dimension mismatch");
    if (!(mu > 0.0)) throw DomainError("unscale: mu must be > 0");
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : p_scaled.terms()) {
        const int d = key.degree();
        double s = mu;
        for (int i = 0; i < d; ++i) s /= mu;
        terms.emplace(key, c * s);
    }
    return FTPolynomial::from_terms(p_scaled.dims(), Vec(I_star.begin(), I_star.end()), std::move(terms));
}

LocalNormalForm local_normal_form(const NearIntegrableSystem& system, std::span<const double> I_star,
                                  std::span<const std::int64_t> p, double T, double mu, const NormalFormConfig& cfg) {
    const int n = system.dims();
    if (static_cast<int>(p.size()) != n) throw DimensionError("local_normal_form: p has the wrong length");
    if (!(mu > 0.0)) throw DomainError("local_normal_form: mu must be > 0");
    if (system.eps > cfg.c1 * mu * mu) throw ConditionError("eps <= c1 mu^2", system.eps, cfg.c1 * mu * mu);
    if (mu > cfg.c2) throw ConditionError("mu <= c2", mu, cfg.c2);
    if (T * mu > cfg.c3) throw ConditionError("T mu <= c3", T * mu, cfg.c3);

    Vec omega_per(n);
    for (int j = 0; j < n; ++j) omega_per[j] = static_cast<double>(p[j]) / T;
    NormalFormConfig run = cfg;
    run.mu = mu;

    ScaledSystem scaled = rescale_system(system, I_star, mu, omega_per);
    NormalFormResult nf = iterate_normal_form(scaled.l, scaled.f_mu, p, T, run);

    LocalNormalForm out{std::move(nf), std::move(scaled), FTPolynomial(n), FTPolynomial(n), {}};
    out.g = unscale(out.scaled.g - out.system.mu_h_mu, I_star, mu);
    out.f_tilde = unscale(out.scaled.remainder, I_star, mu);
    out.I_star.assign(I_star.begin(), I_star.end());
    out.mu = mu;
    out.eps = system.eps;
    out.gf_c0_bound = ck_norm_upper_bound(out.g + out.f_tilde, 0, mu);
    out.angle_gradient = angle_gradient_bound(out.f_tilde, mu);
    out.claimed_gf = mu * mu;
    out.claimed_angle_gradient = std::pow(T * mu, cfg.steps) * mu * mu;
    out.claimed_displacement = T * mu * mu;
    return out;
}

nlohmann::json to_json(const LedgerEntry& e) {
    return {{"step", e.step},
            {"radius", e.radius},
            {"f_norm_bound", e.f_norm_bound},
            {"g_norm_bound", e.g_norm_bound},
            {"chi_norm_bound", e.chi_norm_bound},
            {"residual", e.residual},
            {"homological_defect", e.homological_defect}};
}

nlohmann::json to_json(const NormalFormResult& r) {
    nlohmann::json j;
    j["generators"] = nlohmann::json::array();
    for (const auto& chi : r.generators) j["generators"].push_back(to_json(chi));
    j["l"] = to_json(r.l);
    j["g"] = to_json(r.g);
    j["f_tilde"] = to_json(r.remainder);
    j["ledger"] = nlohmann::json::array();
    for (const auto& e : r.ledger) j["ledger"].push_back(to_json(e));
    j["p"] = r.p;
    j["T"] = r.T;
    j["omega_per"] = r.omega_per;
    return j;
}

nlohmann::json to_json(const LocalNormalForm& r) {
    nlohmann::json j;
    j["scaled"] = to_json(r.scaled);
    j["g"] = to_json(r.g);
    j["f_tilde"] = to_json(r.f_tilde);
    j["I_star"] = r.I_star;
    j["mu"] = r.mu;
    j["eps"] = r.eps;
    j["measured"] = {{"g_plus_f_tilde_c0", r.gf_c0_bound}, {"angle_gradient_f_tilde", r.angle_gradient}};
    j["claimed"] = {{"g_plus_f_tilde_c0", r.claimed_gf},
                    {"angle_gradient_f_tilde", r.claimed_angle_gradient},
                    {"action_displacement", r.claimed_displacement}};
    return j;
}

}  // namespace nekh
