#include "nekh/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <unordered_map>

namespace nekh {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double euclidean_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::int64_t gcd_all(std::span<const std::int64_t> v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
    return g;
}

// ---- MonomialKey -------------------------------------------------------------

int MonomialKey::mode_l1() const {
    int s = 0;
    for (int j = 0; j < kMaxDims; ++j) s += std::abs(mode(j));
    return s;
}

int MonomialKey::degree() const {
    int s = 0;
    for (int j = 0; j < kMaxDims; ++j) s += power(j);
    return s;
}

bool MonomialKey::is_resonant_free() const {
    for (int j = 0; j < kMaxDims; ++j)
        if (mode(j) != 0) return false;
    return true;
}

MonomialKey MonomialKey::conjugate() const {
    MonomialKey c = *this;
    for (int j = 0; j < kMaxDims; ++j) c.mode(j) = static_cast<std::int16_t>(-mode(j));
    return c;
}

bool MonomialKey::canonical_half() const {
    for (int j = 0; j < kMaxDims; ++j)
        if (mode(j) != 0) return mode(j) > 0;
    return false;
}

MonomialKey MonomialKey::make(std::span<const std::int64_t> k, std::span<const std::int64_t> alpha) {
    if (k.size() != alpha.size() || k.size() > static_cast<std::size_t>(kMaxDims))
        throw DimensionError("monomial key: mode and multi-index lengths must agree and be <= kMaxDims");
    MonomialKey key;
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (std::abs(k[j]) > 4000 || alpha[j] < 0 || alpha[j] > 4000)
            throw DomainError("monomial key: mode or exponent out of range");
        key.mode(static_cast<int>(j)) = static_cast<std::int16_t>(k[j]);
        key.power(static_cast<int>(j)) = static_cast<std::int16_t>(alpha[j]);
    }
    return key;
}

std::size_t MonomialKeyHash::operator()(const MonomialKey& key) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto s : key.slots) {
        h ^= static_cast<std::uint16_t>(s);
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

// ---- FTPolynomial ------------------------------------------------------------

namespace {

void check_dims(int n) {
    if (n < 1 || n > kMaxDims) throw DimensionError("FTPolynomial: dims must be in [1, kMaxDims]");
}

void require_same_frame(const FTPolynomial& a, const FTPolynomial& b, const char* op) {
    if (a.dims() != b.dims())
        throw DimensionError(std::string(op) + ": dimension mismatch");
    if (a.center() != b.center())
        throw DomainError(std::string(op) + ": expansion centers differ (recenter explicitly)");
}

double integer_power(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

/** Sums contributions into a hash map and hands back a canonical polynomial.
    Accumulation order is the caller's iteration order, so results are
    deterministic. */
class TermAccumulator {
public:
    TermAccumulator(int n, Vec center) : n_(n), center_(std::move(center)) {}

    void add(const MonomialKey& key, FTPolynomial::Coefficient c) { acc_[key] += c; }

    FTPolynomial finish(double prune_tol = 0.0) && {
        FTPolynomial p(n_, center_);
        for (auto& [key, c] : acc_) p.terms_.emplace(key, c);
        p.canonicalize(prune_tol);
        return p;
    }

private:
    int n_;
    Vec center_;
    std::unordered_map<MonomialKey, FTPolynomial::Coefficient, MonomialKeyHash> acc_;
};

FTPolynomial::FTPolynomial(int n, Vec center) : n_(n), center_(std::move(center)) {
    check_dims(n);
    if (center_.empty()) center_.assign(n, 0.0);
    if (static_cast<int>(center_.size()) != n) throw DimensionError("FTPolynomial: center has wrong length");
}

FTPolynomial FTPolynomial::constant(int n, double value, Vec center) {
    FTPolynomial p(n, std::move(center));
    if (value != 0.0) p.terms_.emplace(MonomialKey{}, Coefficient(value, 0.0));
    return p;
}

FTPolynomial FTPolynomial::action_monomial(int n, std::span<const std::int64_t> alpha, double coefficient,
                                           Vec center) {
    FTPolynomial p(n, std::move(center));
    IntVec zero(n, 0);
    p.add_mode(zero, alpha, coefficient);
    return p;
}

FTPolynomial FTPolynomial::cosine(int n, std::span<const std::int64_t> k, double amplitude, double phase,
                                  Vec center) {
    FTPolynomial p(n, std::move(center));
    IntVec zero(n, 0);
    bool zero_mode = std::all_of(k.begin(), k.end(), [](auto x) { return x == 0; });
    if (zero_mode)
        p.add_mode(k, zero, amplitude * std::cos(phase));
    else
        p.add_mode(k, zero, std::polar(0.5 * amplitude, phase));
    return p;
}

FTPolynomial FTPolynomial::linear(std::span<const double> omega, Vec center) {
    const int n = static_cast<int>(omega.size());
    FTPolynomial p(n, std::move(center));
    IntVec zero(n, 0);
    for (int j = 0; j < n; ++j) {
        IntVec alpha(n, 0);
        alpha[j] = 1;
        p.add_mode(zero, alpha, omega[j]);
    }
    return p;
}

FTPolynomial FTPolynomial::quadratic(int n, std::span<const double> hessian, std::span<const double> gradient,
                                     Vec center) {
    if (hessian.size() != static_cast<std::size_t>(n * n))
        throw DimensionError("quadratic: Hessian must be n x n");
    if (!gradient.empty() && gradient.size() != static_cast<std::size_t>(n))
        throw DimensionError("quadratic: gradient must have length n");
    FTPolynomial p(n, std::move(center));
    IntVec zero(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            IntVec alpha(n, 0);
            alpha[i] += 1;
            alpha[j] += 1;
            const double c = (i == j) ? 0.5 * hessian[i * n + i] : 0.5 * (hessian[i * n + j] + hessian[j * n + i]);
            p.add_mode(zero, alpha, c);
        }
        if (!gradient.empty()) {
            IntVec alpha(n, 0);
            alpha[i] = 1;
            p.add_mode(zero, alpha, gradient[i]);
        }
    }
    return p;
}

FTPolynomial FTPolynomial::from_terms(int n, Vec center, TermMap terms) {
    FTPolynomial p(n, std::move(center));
    for (auto it = terms.begin(); it != terms.end();) {
        if (it->second == Coefficient(0.0, 0.0))
            it = terms.erase(it);
        else
            ++it;
    }
    for (const auto& [key, c] : terms) {
        for (int j = n; j < kMaxDims; ++j)
            if (key.mode(j) != 0 || key.power(j) != 0)
                throw DimensionError("FTPolynomial: term uses slots beyond dims");
        if (key.is_resonant_free()) {
            if (c.imag() != 0.0) throw DomainError("FTPolynomial: k = 0 coefficient must be real");
            continue;
        }
        auto partner = terms.find(key.conjugate());
        if (partner == terms.end() || partner->second != std::conj(c))
            throw DomainError("FTPolynomial: reality condition c(-k) = conj(c(k)) violated");
    }
    p.terms_ = std::move(terms);
    return p;
}

bool FTPolynomial::is_integrable() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.is_resonant_free(); });
}

int FTPolynomial::max_mode_l1() const {
    int m = 0;
    for (const auto& [key, c] : terms_) m = std::max(m, key.mode_l1());
    return m;
}

int FTPolynomial::max_degree() const {
    int m = 0;
    for (const auto& [key, c] : terms_) m = std::max(m, key.degree());
    return m;
}

FTPolynomial::Coefficient FTPolynomial::coefficient(std::span<const std::int64_t> k,
                                                    std::span<const std::int64_t> alpha) const {
    if (static_cast<int>(k.size()) != n_ || static_cast<int>(alpha.size()) != n_)
        throw DimensionError("coefficient: dimension mismatch");
    auto it = terms_.find(MonomialKey::make(k, alpha));
    return it == terms_.end() ? Coefficient{} : it->second;
}

FTPolynomial& FTPolynomial::add_mode(std::span<const std::int64_t> k, std::span<const std::int64_t> alpha,
                                     Coefficient c) {
    if (static_cast<int>(k.size()) != n_ || static_cast<int>(alpha.size()) != n_)
        throw DimensionError("add_mode: dimension mismatch");
    const MonomialKey key = MonomialKey::make(k, alpha);
    if (key.is_resonant_free()) {
        terms_[key] += Coefficient(c.real(), 0.0);
    } else {
        terms_[key] += c;
        terms_[key.conjugate()] += std::conj(c);
    }
    canonicalize();
    return *this;
}

void FTPolynomial::canonicalize(double prune_tol) {
    for (auto& [key, c] : terms_) {
        if (key.is_resonant_free()) {
            c.imag(0.0);
            continue;
        }
        if (!key.canonical_half()) continue;
        auto partner = terms_.find(key.conjugate());
        if (partner == terms_.end()) {
            // The missing half is implicitly zero.
            c *= 0.5;
            terms_.emplace(key.conjugate(), std::conj(c));
            continue;
        }
        if (partner->second == std::conj(c)) continue;
        const Coefficient avg = 0.5 * (c + std::conj(partner->second));
        c = avg;
        partner->second = std::conj(avg);
    }
    // A lone non-canonical half (no canonical partner) is handled here.
    std::vector<MonomialKey> lonely;
    for (const auto& [key, c] : terms_)
        if (!key.is_resonant_free() && !key.canonical_half() && !terms_.contains(key.conjugate()))
            lonely.push_back(key);
    for (const auto& key : lonely) {
        auto& c = terms_[key];
        c *= 0.5;
        terms_[key.conjugate()] = std::conj(c);
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= prune_tol)
            it = terms_.erase(it);
        else
            ++it;
    }
}

// ---- evaluation --------------------------------------------------------------

double evaluate(const FTPolynomial& p, std::span<const double> theta, std::span<const double> action) {
    const int n = p.dims();
    if (static_cast<int>(theta.size()) != n || static_cast<int>(action.size()) != n)
        throw DimensionError("evaluate: argument length does not match polynomial dims");
    Vec th(n), x(n);
    for (int j = 0; j < n; ++j) {
        th[j] = theta[j] - std::floor(theta[j]);
        x[j] = action[j] - p.center()[j];
    }
    double sum = 0.0;
    for (const auto& [key, c] : p.terms()) {
        double phase = 0.0;
        double mono = 1.0;
        for (int j = 0; j < n; ++j) {
            phase += key.mode(j) * th[j];
            mono *= integer_power(x[j], key.power(j));
        }
        phase -= std::round(phase);
        const double angle = kTwoPi * phase;
        sum += (c.real() * std::cos(angle) - c.imag() * std::sin(angle)) * mono;
    }
    return sum;
}

// ---- linear structure --------------------------------------------------------

FTPolynomial operator+(const FTPolynomial& a, const FTPolynomial& b) {
    require_same_frame(a, b, "add");
    TermAccumulator acc(a.dims(), a.center());
    for (const auto& [key, c] : a.terms()) acc.add(key, c);
    for (const auto& [key, c] : b.terms()) acc.add(key, c);
    return std::move(acc).finish();
}

FTPolynomial operator-(const FTPolynomial& a) { return -1.0 * a; }

FTPolynomial operator-(const FTPolynomial& a, const FTPolynomial& b) {
    require_same_frame(a, b, "subtract");
    TermAccumulator acc(a.dims(), a.center());
    for (const auto& [key, c] : a.terms()) acc.add(key, c);
    for (const auto& [key, c] : b.terms()) acc.add(key, -c);
    return std::move(acc).finish();
}

FTPolynomial operator*(double s, const FTPolynomial& a) {
    FTPolynomial::TermMap terms;
    if (s != 0.0)
        for (const auto& [key, c] : a.terms()) terms.emplace(key, s * c);
    return FTPolynomial::from_terms(a.dims(), a.center(), std::move(terms));
}

FTPolynomial multiply(const FTPolynomial& a, const FTPolynomial& b) {
    require_same_frame(a, b, "multiply");
    TermAccumulator acc(a.dims(), a.center());
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            MonomialKey key;
            for (int j = 0; j < 2 * kMaxDims; ++j)
                key.slots[j] = static_cast<std::int16_t>(ka.slots[j] + kb.slots[j]);
            acc.add(key, ca * cb);
        }
    }
    return std::move(acc).finish();
}

FTPolynomial derivative_angle(const FTPolynomial& p, int j) {
    if (j < 0 || j >= p.dims()) throw DimensionError("derivative_angle: index out of range");
    TermAccumulator acc(p.dims(), p.center());
    for (const auto& [key, c] : p.terms())
        if (key.mode(j) != 0) acc.add(key, c * FTPolynomial::Coefficient(0.0, kTwoPi * key.mode(j)));
    return std::move(acc).finish();
}

FTPolynomial derivative_action(const FTPolynomial& p, int j) {
    if (j < 0 || j >= p.dims()) throw DimensionError("derivative_action: index out of range");
    TermAccumulator acc(p.dims(), p.center());
    for (const auto& [key, c] : p.terms()) {
        if (key.power(j) == 0) continue;
        MonomialKey d = key;
        d.power(j) = static_cast<std::int16_t>(key.power(j) - 1);
        acc.add(d, c * static_cast<double>(key.power(j)));
    }
    return std::move(acc).finish();
}

// ---- Poisson bracket ---------------------------------------------------------

namespace {

double term_bound(const MonomialKey& key, double magnitude, int order, double radius);

template <class Sink>
void bracket_terms(const FTPolynomial& f, const FTPolynomial& g, Sink&& sink) {
    const int n = f.dims();
    const FTPolynomial::Coefficient two_pi_i(0.0, kTwoPi);
    for (const auto& [ka, ca] : f.terms()) {
        for (const auto& [kb, cb] : g.terms()) {
            MonomialKey sum;
            for (int j = 0; j < 2 * kMaxDims; ++j)
                sum.slots[j] = static_cast<std::int16_t>(ka.slots[j] + kb.slots[j]);
            const FTPolynomial::Coefficient prod = two_pi_i * ca * cb;
            for (int j = 0; j < n; ++j) {
                // d_{I_j} f d_{theta_j} g - d_{theta_j} f d_{I_j} g
                const int weight = ka.power(j) * kb.mode(j) - ka.mode(j) * kb.power(j);
                if (weight == 0) continue;
                MonomialKey key = sum;
                key.power(j) = static_cast<std::int16_t>(key.power(j) - 1);
                sink(key, prod * static_cast<double>(weight));
            }
        }
    }
}

}  // namespace

FTPolynomial poisson_bracket(const FTPolynomial& f, const FTPolynomial& g) {
    require_same_frame(f, g, "poisson_bracket");
    TermAccumulator acc(f.dims(), f.center());
    bracket_terms(f, g, [&](const MonomialKey& key, FTPolynomial::Coefficient c) { acc.add(key, c); });
    return std::move(acc).finish();
}

Truncated poisson_bracket(const FTPolynomial& f, const FTPolynomial& g, const Truncation& caps) {
    require_same_frame(f, g, "poisson_bracket");
    TermAccumulator acc(f.dims(), f.center());
    TermAccumulator dropped(f.dims(), f.center());
    bool any_dropped = false;
    bracket_terms(f, g, [&](const MonomialKey& key, FTPolynomial::Coefficient c) {
        if (caps.keeps(key)) {
            acc.add(key, c);
        } else {
            dropped.add(key, c);
            any_dropped = true;
        }
    });
    Truncated out{std::move(acc).finish(), 0.0};
    if (any_dropped)
        out.dropped_bound = ck_norm_upper_bound(std::move(dropped).finish(), caps.norm_order, caps.norm_radius);
    return out;
}

FTPolynomial compose_linear_flow(const FTPolynomial& p, std::span<const double> omega, double t) {
    if (static_cast<int>(omega.size()) != p.dims()) throw DimensionError("compose_linear_flow: dimension mismatch");
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : p.terms()) {
        if (key.is_resonant_free()) {
            terms.emplace(key, c);
            continue;
        }
        double kw = 0.0;
        for (int j = 0; j < p.dims(); ++j) kw += key.mode(j) * omega[j];
        const double angle = kTwoPi * t * kw;
        terms.emplace(key, c * FTPolynomial::Coefficient(std::cos(angle), std::sin(angle)));
    }
    // Conjugate phases are computed independently; canonicalize restores exact reality.
    TermAccumulator acc(p.dims(), p.center());
    for (const auto& [key, c] : terms) acc.add(key, c);
    return std::move(acc).finish();
}

FTPolynomial recenter(const FTPolynomial& p, std::span<const double> new_center) {
    const int n = p.dims();
    if (static_cast<int>(new_center.size()) != n) throw DimensionError("recenter: dimension mismatch");
    Vec shift(n);
    for (int j = 0; j < n; ++j) shift[j] = new_center[j] - p.center()[j];
    TermAccumulator acc(n, Vec(new_center.begin(), new_center.end()));
    // (y + s)^alpha = prod_j sum_b C(alpha_j, b) s_j^(alpha_j - b) y_j^b
    for (const auto& [key, c] : p.terms()) {
        std::array<int, kMaxDims> b{};
        while (true) {
            double weight = 1.0;
            MonomialKey out = key;
            for (int j = 0; j < n; ++j) {
                const int a = key.power(j);
                double binom = 1.0;
                for (int i = 0; i < b[j]; ++i) binom = binom * (a - i) / (i + 1);
                weight *= binom * integer_power(shift[j], a - b[j]);
                out.power(j) = static_cast<std::int16_t>(b[j]);
            }
            if (weight != 0.0) acc.add(out, c * weight);
            int j = 0;
            for (; j < n; ++j) {
                if (b[j] < key.power(j)) {
                    ++b[j];
                    break;
                }
                b[j] = 0;
            }
            if (j == n) break;
        }
    }
    return std::move(acc).finish();
}

FTPolynomial scale_actions(const FTPolynomial& p, double s) {
    FTPolynomial::TermMap terms;
    for (const auto& [key, c] : p.terms()) {
        const auto scaled = c * integer_power(s, key.degree());
        if (scaled != FTPolynomial::Coefficient{}) terms.emplace(key, scaled);
    }
    TermAccumulator acc(p.dims(), Vec(p.dims(), 0.0));
    for (const auto& [key, c] : terms) acc.add(key, c);
    return std::move(acc).finish();
}

Truncated truncate(const FTPolynomial& p, const Truncation& caps) {
    TermAccumulator kept(p.dims(), p.center());
    TermAccumulator dropped(p.dims(), p.center());
    bool any = false;
    for (const auto& [key, c] : p.terms()) {
        if (caps.keeps(key)) {
            kept.add(key, c);
        } else {
            dropped.add(key, c);
            any = true;
        }
    }
    Truncated out{std::move(kept).finish(), 0.0};
    if (any) out.dropped_bound = ck_norm_upper_bound(std::move(dropped).finish(), caps.norm_order, caps.norm_radius);
    return out;
}

FTPolynomial prune(const FTPolynomial& p, double tol) {
    FTPolynomial q = p;
    q.canonicalize(tol);
    return q;
}

double max_coefficient_difference(const FTPolynomial& a, const FTPolynomial& b) {
    if (a.dims() != b.dims()) throw DimensionError("max_coefficient_difference: dimension mismatch");
    double m = 0.0;
    for (const auto& [key, c] : a.terms()) {
        auto it = b.terms().find(key);
        m = std::max(m, std::abs(c - (it == b.terms().end() ? FTPolynomial::Coefficient{} : it->second)));
    }
    for (const auto& [key, c] : b.terms())
        if (!a.terms().contains(key)) m = std::max(m, std::abs(c));
    return m;
}

double max_abs_coefficient(const FTPolynomial& p) {
    double m = 0.0;
    for (const auto& [key, c] : p.terms()) m = std::max(m, std::abs(c));
    return m;
}

// ---- norms -------------------------------------------------------------------

namespace {

// Largest derivative factor of one monomial over |beta| <= order.  Each
// theta_j derivative multiplies by 2 pi |k_j|; the b-th derivative in I_j
// multiplies by (alpha_j - b) / R.  All factor sequences are nonincreasing,
// so taking the largest factors > 1 greedily is optimal.
double term_bound(const MonomialKey& key, double magnitude, int order, double radius) {
    double value = magnitude * integer_power(radius, key.degree());
    if (order <= 0 || value == 0.0) return value;
    struct Slot {
        double factor;
        int dim;
        bool action;
        int taken;
    };
    auto cmp = [](const Slot& a, const Slot& b) { return a.factor < b.factor; };
    std::priority_queue<Slot, std::vector<Slot>, decltype(cmp)> heap(cmp);
    for (int j = 0; j < kMaxDims; ++j) {
        if (key.mode(j) != 0) heap.push({kTwoPi * std::abs(key.mode(j)), j, false, 0});
        if (key.power(j) > 0) heap.push({key.power(j) / radius, j, true, 0});
    }
    for (int taken = 0; taken < order && !heap.empty(); ++taken) {
        Slot s = heap.top();
        if (s.factor <= 1.0) break;
        heap.pop();
        value *= s.factor;
        if (!s.action) {
            heap.push(s);
        } else {
            ++s.taken;
            const int remaining = key.power(s.dim) - s.taken;
            if (remaining > 0) heap.push({remaining / radius, s.dim, true, s.taken});
        }
    }
    return value;
}

}  // namespace

double ck_norm_upper_bound(const FTPolynomial& p, int order, double radius) {
    if (order < 0) throw DomainError("ck_norm_upper_bound: order must be >= 0");
    if (!(radius > 0.0)) throw DomainError("ck_norm_upper_bound: radius must be > 0");
    double sum = 0.0;
    for (const auto& [key, c] : p.terms()) sum += term_bound(key, std::abs(c), order, radius);
    return sum;
}

double angle_gradient_bound(const FTPolynomial& p, double radius) {
    if (!(radius > 0.0)) throw DomainError("angle_gradient_bound: radius must be > 0");
    double best = 0.0;
    for (int j = 0; j < p.dims(); ++j) {
        double s = 0.0;
        for (const auto& [key, c] : p.terms())
            s += std::abs(c) * kTwoPi * std::abs(key.mode(j)) * integer_power(radius, key.degree());
        best = std::max(best, s);
    }
    return best;
}

// ---- synthesis ---------------------------------------------------------------

namespace {

void enumerate_modes(int n, int cap, std::vector<IntVec>& out) {
    IntVec k(n, 0);
    auto rec = [&](auto&& self, int j, int budget) -> void {
        if (j == n) {
            const MonomialKey key = MonomialKey::make(k, IntVec(n, 0));
            if (key.canonical_half()) out.push_back(k);
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            k[j] = v;
            self(self, j + 1, budget - std::abs(v));
        }
        k[j] = 0;
    };
    rec(rec, 0, cap);
}

void enumerate_multi_indices(int n, int max_degree, std::vector<IntVec>& out) {
    IntVec a(n, 0);
    auto rec = [&](auto&& self, int j, int budget) -> void {
        if (j == n) {
            out.push_back(a);
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            a[j] = v;
            self(self, j + 1, budget - v);
        }
        a[j] = 0;
    };
    rec(rec, 0, max_degree);
}

}  // namespace

FTPolynomial synthesize_ck_perturbation(const RegularityProfile& profile, int n) {
    check_dims(n);
    if (profile.fourier_cap < 1) throw DomainError("synthesize_ck_perturbation: K_max must be >= 1");
    if (profile.target_eps < 0.0) throw DomainError("synthesize_ck_perturbation: target_eps must be >= 0");
    if (profile.action_degree < 0) throw DomainError("synthesize_ck_perturbation: action_degree must be >= 0");
    if (profile.target_eps == 0.0) return FTPolynomial(n);

    const double decay = profile.decay_for(n);
    std::vector<IntVec> modes, powers;
    enumerate_modes(n, profile.fourier_cap, modes);
    enumerate_multi_indices(n, profile.action_degree, powers);

    std::mt19937_64 rng(profile.seed);
    FTPolynomial::TermMap terms;
    for (const auto& k : modes) {
        int l1 = 0;
        for (auto v : k) l1 += static_cast<int>(std::abs(v));
        const double magnitude = std::pow(1.0 + l1, -decay);
        for (const auto& alpha : powers) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            const auto c = std::polar(magnitude, kTwoPi * u);
            const MonomialKey key = MonomialKey::make(k, alpha);
            terms.emplace(key, c);
            terms.emplace(key.conjugate(), std::conj(c));
        }
    }
    const FTPolynomial raw = FTPolynomial::from_terms(n, Vec(n, 0.0), std::move(terms));
    const double bound = ck_norm_upper_bound(raw, profile.k_reg, profile.radius);
    return (profile.target_eps / bound) * raw;
}

// ---- serialization -----------------------------------------------------------

nlohmann::json to_json(const FTPolynomial& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [key, c] : p.terms()) {
        IntVec k(p.dims()), a(p.dims());
        for (int j = 0; j < p.dims(); ++j) {
            k[j] = key.mode(j);
            a[j] = key.power(j);
        }
        terms.push_back({{"k", k}, {"alpha", a}, {"re", c.real()}, {"im", c.imag()}});
    }
    return {{"n", p.dims()}, {"center", p.center()}, {"terms", terms}};
}

FTPolynomial polynomial_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        check_dims(n);
        Vec center = j.contains("center") ? j.at("center").get<Vec>() : Vec(n, 0.0);
        FTPolynomial::TermMap terms;
        for (const auto& t : j.at("terms")) {
            const auto k = t.at("k").get<IntVec>();
            const auto a = t.at("alpha").get<IntVec>();
            if (static_cast<int>(k.size()) != n || static_cast<int>(a.size()) != n)
                throw ParseError("polynomial JSON: term vector length differs from n");
            const FTPolynomial::Coefficient c(t.at("re").get<double>(), t.value("im", 0.0));
            if (!terms.emplace(MonomialKey::make(k, a), c).second)
                throw ParseError("polynomial JSON: duplicate term");
        }
        return FTPolynomial::from_terms(n, std::move(center), std::move(terms));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("polynomial JSON: ") + e.what());
    } catch (const DomainError& e) {
        throw ParseError(std::string("polynomial JSON: ") + e.what());
    }
}

}  // namespace nekh
