#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <span>

#include "json.hpp"
#include "nekh/common.hpp"

namespace nekh {

/** Index of one Fourier-Taylor monomial (I-Ic)^alpha e^{2 pi i k.theta}.
    Slots [0, kMaxDims) hold the Fourier mode k, slots [kMaxDims, 2 kMaxDims)
    the multi-index alpha; unused slots are zero. */
struct MonomialKey {
    std::array<std::int16_t, 2 * kMaxDims> slots{};

    std::int16_t mode(int j) const { return slots[j]; }
    std::int16_t power(int j) const { return slots[kMaxDims + j]; }
    std::int16_t& mode(int j) { return slots[j]; }
    std::int16_t& power(int j) { return slots[kMaxDims + j]; }

    int mode_l1() const;
    int degree() const;
    bool is_resonant_free() const;  ///< k == 0
    MonomialKey conjugate() const;  ///< (-k, alpha)
    /// True if k lies in the canonical half-space (first non-zero entry > 0).
    bool canonical_half() const;

    static MonomialKey make(std::span<const std::int64_t> k, std::span<const std::int64_t> alpha);

    friend auto operator<=>(const MonomialKey&, const MonomialKey&) = default;
};

struct MonomialKeyHash {
    std::size_t operator()(const MonomialKey& key) const noexcept;
};

/** Finite Fourier-Taylor polynomial
        p(theta, I) = sum_{k, alpha} c_{k,alpha} (I - Ic)^alpha e^{2 pi i k.theta}
    on T^n x R^n.  Both halves of every conjugate pair are stored and the
    reality condition c_{-k,alpha} = conj(c_{k,alpha}) is enforced exactly
    after every operation.  Values are immutable once built; all algebra is
    done by free functions returning new polynomials. */
class FTPolynomial {
public:
    using Coefficient = std::complex<double>;
    using TermMap = std::map<MonomialKey, Coefficient>;

    /// Zero polynomial in n degrees of freedom, expanded around `center`
    /// (origin when empty).
    explicit FTPolynomial(int n, Vec center = {});
    /// Zero polynomial in one degree of freedom (placeholder for aggregates).
    FTPolynomial() : n_(1), center_(1, 0.0) {}

    static FTPolynomial constant(int n, double value, Vec center = {});
    /// The real monomial `coefficient * (I - Ic)^alpha`.
    static FTPolynomial action_monomial(int n, std::span<const std::int64_t> alpha,
                                        double coefficient, Vec center = {});
    /// amplitude * cos(2 pi k.theta + phase)
    static FTPolynomial cosine(int n, std::span<const std::int64_t> k, double amplitude,
                               double phase = 0.0, Vec center = {});
    /// Linear Hamiltonian omega.(I - Ic).
    static FTPolynomial linear(std::span<const double> omega, Vec center = {});
    /// Quadratic 1/2 (I-Ic).A(I-Ic) + b.(I-Ic) with symmetric A (row-major n x n).
    static FTPolynomial quadratic(int n, std::span<const double> hessian_row_major,
                                  std::span<const double> gradient = {}, Vec center = {});
    /// Builds from raw terms; fails unless the reality condition holds exactly.
    static FTPolynomial from_terms(int n, Vec center, TermMap terms);

    int dims() const noexcept { return n_; }
    const Vec& center() const noexcept { return center_; }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_integrable() const;
    int max_mode_l1() const;
    int max_degree() const;

    Coefficient coefficient(std::span<const std::int64_t> k,
                            std::span<const std::int64_t> alpha) const;

    /// Adds c at (k, alpha) and conj(c) at (-k, alpha); for k = 0 only Re(c)
    /// is added.  So `add_mode(k, 0, 0.5)` adds cos(2 pi k.theta).
    FTPolynomial& add_mode(std::span<const std::int64_t> k, std::span<const std::int64_t> alpha,
                           Coefficient c);

    /// Restores the reality condition exactly and erases coefficients with
    /// |c| <= prune_tol (exact zeros only by default).
    void canonicalize(double prune_tol = 0.0);

    friend bool operator==(const FTPolynomial&, const FTPolynomial&) = default;

private:
    friend class TermAccumulator;
    int n_;
    Vec center_;
    TermMap terms_;
};

/// Caps for the truncating operations; terms beyond either cap are dropped
/// and their C^norm_order bound on the ball of radius norm_radius is
/// accumulated as the truncation residual.
struct Truncation {
    int fourier_cap = std::numeric_limits<int>::max();
    int degree_cap = std::numeric_limits<int>::max();
    int norm_order = 0;
    double norm_radius = 1.0;

    bool keeps(const MonomialKey& key) const {
        return key.mode_l1() <= fourier_cap && key.degree() <= degree_cap;
    }
};

struct Truncated {
    FTPolynomial value;
    double dropped_bound = 0.0;
};

// ---- evaluation -------------------------------------------------------------

double evaluate(const FTPolynomial& p, std::span<const double> theta, std::span<const double> action);

// ---- linear structure and products ------------------------------------------

FTPolynomial operator+(const FTPolynomial& a, const FTPolynomial& b);
FTPolynomial operator-(const FTPolynomial& a, const FTPolynomial& b);
FTPolynomial operator-(const FTPolynomial& a);
FTPolynomial operator*(double s, const FTPolynomial& a);
FTPolynomial multiply(const FTPolynomial& a, const FTPolynomial& b);

FTPolynomial derivative_angle(const FTPolynomial& p, int j);
FTPolynomial derivative_action(const FTPolynomial& p, int j);

/** Poisson bracket {f,g} = d_I f . d_theta g - d_theta f . d_I g, matching
    the Hamiltonian vector field X_f = (d_I f, -d_theta f): {f,g} is the
    derivative of g along X_f.  Requires equal dims and centers. */
FTPolynomial poisson_bracket(const FTPolynomial& f, const FTPolynomial& g);
Truncated poisson_bracket(const FTPolynomial& f, const FTPolynomial& g, const Truncation& caps);

/// p(theta + t omega, I): multiplies c_{k,alpha} by e^{2 pi i t k.omega}.
FTPolynomial compose_linear_flow(const FTPolynomial& p, std::span<const double> omega, double t);

/// Exact Taylor shift to a new expansion center.
FTPolynomial recenter(const FTPolynomial& p, std::span<const double> new_center);

/// q(theta, J) = p(theta, Ic + s J), returned centered at the origin of J.
FTPolynomial scale_actions(const FTPolynomial& p, double s);

Truncated truncate(const FTPolynomial& p, const Truncation& caps);
FTPolynomial prune(const FTPolynomial& p, double tol);

/// Largest |a_{k,alpha} - b_{k,alpha}| over the union of supports.
double max_coefficient_difference(const FTPolynomial& a, const FTPolynomial& b);
double max_abs_coefficient(const FTPolynomial& p);

// ---- norms ------------------------------------------------------------------

/** Upper bound on |p|_{C^k} over T^n x {|I - Ic|_inf <= R}:
        sum_{k,alpha} |c_{k,alpha}| max_{|beta| <= k} |d^beta monomial|,
    where theta-derivatives contribute 2 pi |k_j| each and action derivatives
    the falling-factorial bound on R^|alpha|. */
double ck_norm_upper_bound(const FTPolynomial& p, int order, double radius);

/// Bound on max_j sup |d_{theta_j} p| over the same ball.
double angle_gradient_bound(const FTPolynomial& p, double radius);

// ---- synthesis --------------------------------------------------------------

/** Parameters of a synthesized C^k-class perturbation.  Coefficient
    magnitudes decay as (1 + |k|_1)^{-decay_exponent}; phases are uniform. */
struct RegularityProfile {
    int k_reg = 3;
    int fourier_cap = 8;          ///< K_max
    double decay_exponent = 0.0;  ///< <= 0 selects the default k_reg + n + 1
    std::uint64_t seed = 1;
    double target_eps = 1e-3;
    int action_degree = 1;        ///< max |alpha| of the action dependence
    double radius = 1.0;          ///< R in the normalizing C^k bound

    double decay_for(int n) const {
        return decay_exponent > 0.0 ? decay_exponent : static_cast<double>(k_reg + n + 1);
    }
};

FTPolynomial synthesize_ck_perturbation(const RegularityProfile& profile, int n);

// ---- serialization ----------------------------------------------------------

nlohmann::json to_json(const FTPolynomial& p);
FTPolynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace nekh
