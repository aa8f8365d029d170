#include "nekh/evaluator.hpp"

#include <cmath>

namespace nekh {

HamiltonianEvaluator::HamiltonianEvaluator(const FTPolynomial& p)
    : n_(p.dims()), max_mode_(0), max_degree_(0), center_(p.center()) {
    for (const auto& [key, c] : p.terms()) {
        double weight;
        if (key.is_resonant_free())
            weight = 1.0;
        else if (key.canonical_half())
            weight = 2.0;
        else
            continue;
        Term t{weight * c, {}, {}};
        for (int j = 0; j < n_; ++j) {
            t.k[j] = key.mode(j);
            t.alpha[j] = key.power(j);
            max_mode_ = std::max(max_mode_, std::abs(static_cast<int>(key.mode(j))));
            max_degree_ = std::max(max_degree_, static_cast<int>(key.power(j)));
        }
        terms_.push_back(t);
    }
}

HamiltonianEvaluator::Workspace HamiltonianEvaluator::make_workspace() const {
    Workspace ws;
    ws.phases.resize(static_cast<std::size_t>(n_) * (2 * max_mode_ + 1));
    ws.powers.resize(static_cast<std::size_t>(n_) * (max_degree_ + 1));
    return ws;
}

void HamiltonianEvaluator::fill_tables(std::span<const double> theta, std::span<const double> action,
                                       Workspace& ws) const {
    if (static_cast<int>(theta.size()) != n_ || static_cast<int>(action.size()) != n_)
        throw DimensionError("HamiltonianEvaluator: argument length does not match dims");
    const int width = 2 * max_mode_ + 1;
    const int depth = max_degree_ + 1;
    for (int j = 0; j < n_; ++j) {
        const double th = theta[j] - std::floor(theta[j]);
        std::complex<double>* row = ws.phases.data() + j * width + max_mode_;
        row[0] = 1.0;
        for (int m = 1; m <= max_mode_; ++m) {
            double a = m * th;
            a -= std::round(a);
            const std::complex<double> e(std::cos(kTwoPi * a), std::sin(kTwoPi * a));
            row[m] = e;
            row[-m] = std::conj(e);
        }
        double* pw = ws.powers.data() + j * depth;
        const double x = action[j] - center_[j];
        pw[0] = 1.0;
        for (int e = 1; e < depth; ++e) pw[e] = pw[e - 1] * x;
    }
}

double HamiltonianEvaluator::value(std::span<const double> theta, std::span<const double> action,
                                   Workspace& ws) const {
    fill_tables(theta, action, ws);
    const int width = 2 * max_mode_ + 1;
    const int depth = max_degree_ + 1;
    double sum = 0.0;
    for (const Term& t : terms_) {
        std::complex<double> z = t.c;
        double mono = 1.0;
        for (int j = 0; j < n_; ++j) {
            if (t.k[j] != 0) z *= ws.phases[j * width + max_mode_ + t.k[j]];
            mono *= ws.powers[j * depth + t.alpha[j]];
        }
        sum += z.real() * mono;
    }
    return sum;
}

double HamiltonianEvaluator::gradient(std::span<const double> theta, std::span<const double> action,
                                      std::span<double> d_theta, std::span<double> d_action, Workspace& ws) const {
    fill_tables(theta, action, ws);
    const int width = 2 * max_mode_ + 1;
    const int depth = max_degree_ + 1;
    for (int j = 0; j < n_; ++j) d_theta[j] = d_action[j] = 0.0;
    double sum = 0.0;
    for (const Term& t : terms_) {
        std::complex<double> z = t.c;
        double mono = 1.0;
        for (int j = 0; j < n_; ++j) {
            if (t.k[j] != 0) z *= ws.phases[j * width + max_mode_ + t.k[j]];
            mono *= ws.powers[j * depth + t.alpha[j]];
        }
        sum += z.real() * mono;
        const double im = z.imag() * mono;
        for (int j = 0; j < n_; ++j) {
            if (t.k[j] != 0) d_theta[j] -= kTwoPi * t.k[j] * im;
            if (t.alpha[j] != 0) {
                double partial = z.real() * t.alpha[j] * ws.powers[j * depth + t.alpha[j] - 1];
                for (int i = 0; i < n_; ++i)
                    if (i != j) partial *= ws.powers[i * depth + t.alpha[i]];
                d_action[j] += partial;
            }
        }
    }
    return sum;
}

double HamiltonianEvaluator::value(std::span<const double> theta, std::span<const double> action) const {
    Workspace ws = make_workspace();
    return value(theta, action, ws);
}

}  // namespace nekh
