#include "nekh/system.hpp"

namespace nekh {

NearIntegrableSystem::NearIntegrableSystem(FTPolynomial h_, FTPolynomial f_, double R_, int k_reg_,
                                           std::optional<double> M_, std::optional<double> eps_)
    : h(std::move(h_)), f(std::move(f_)), R(R_), k_reg(k_reg_), M(M_) {
    if (h.dims() != f.dims()) throw DimensionError("NearIntegrableSystem: h and f dimensions differ");
    if (!h.is_integrable()) throw DomainError("NearIntegrableSystem: h must not depend on the angles");
    if (!(R > 0.0)) throw DomainError("NearIntegrableSystem: R must be > 0");
    if (k_reg < 2) throw DomainError("NearIntegrableSystem: k_reg must be >= 2");
    if (f.center() != h.center()) f = recenter(f, h.center());
    eps = eps_ ? *eps_ : ck_norm_upper_bound(f, k_reg, R);
    if (eps < 0.0) throw DomainError("NearIntegrableSystem: eps must be >= 0");
}

FTPolynomial standard_quadratic(int n) {
    Vec A(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) A[i * n + i] = 1.0;
    return FTPolynomial::quadratic(n, A);
}

namespace {

Vec vec_or(const nlohmann::json& j, const char* key, Vec fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    return j[key].get<Vec>();
}

FTPolynomial h_from_json(const nlohmann::json& j, int n) {
    const std::string type = j.value("type", "quadratic");
    if (type == "polynomial") return polynomial_from_json(j);
    if (type != "quadratic") throw ParseError("system: unknown h type '" + type + "'");
    Vec A;
    if (j.contains("hessian")) {
        A = j["hessian"].get<Vec>();
    } else {
        A.assign(static_cast<std::size_t>(n * n), 0.0);
        for (int i = 0; i < n; ++i) A[i * n + i] = 1.0;
    }
    if (static_cast<int>(A.size()) != n * n) throw ParseError("system: hessian must have n*n entries");
    const Vec b = vec_or(j, "gradient", {});
    const Vec c = vec_or(j, "center", {});
    return FTPolynomial::quadratic(n, A, b, c);
}

}  // namespace

NearIntegrableSystem system_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ParseError("system: expected an object");
        const int n = j.at("n").get<int>();
        if (n < 1 || n > kMaxDims) throw ParseError("system: n out of range");
        const double R = j.value("R", 1.0);
        const int k_reg = j.value("k_reg", 3);
        std::optional<double> M;
        if (j.contains("M") && !j["M"].is_null()) M = j["M"].get<double>();

        FTPolynomial h = j.contains("h") ? h_from_json(j["h"], n) : standard_quadratic(n);
        if (h.dims() != n) throw ParseError("system: h has the wrong dimension");

        std::optional<double> eps;
        FTPolynomial f(n, h.center());
        if (j.contains("f")) {
            const auto& fj = j["f"];
            const std::string type = fj.value("type", "zero");
            if (type == "synthesized") {
                RegularityProfile prof;
                prof.k_reg = fj.value("k_reg", k_reg);
                prof.fourier_cap = fj.value("fourier_cap", prof.fourier_cap);
                prof.decay_exponent = fj.value("decay_exponent", 0.0);
                prof.seed = fj.value("seed", std::uint64_t{1});
                prof.target_eps = fj.at("eps").get<double>();
                prof.action_degree = fj.value("action_degree", 1);
                prof.radius = R;
                f = synthesize_ck_perturbation(prof, n);
                f = FTPolynomial::from_terms(n, h.center(), f.terms());
                eps = prof.target_eps;
            } else if (type == "polynomial") {
                f = polynomial_from_json(fj);
                if (fj.contains("eps")) eps = fj["eps"].get<double>();
            } else if (type != "zero") {
                throw ParseError("system: unknown f type '" + type + "'");
            }
        }
        if (f.dims() != n) throw ParseError("system: f has the wrong dimension");
        return NearIntegrableSystem(std::move(h), std::move(f), R, k_reg, M, eps);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("system: ") + e.what());
    }
}

}  // namespace nekh
