#include "nekh/flow.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "nekh/evaluator.hpp"

namespace nekh {

namespace odeint = boost::numeric::odeint;

PhasePoint hamiltonian_flow(const FTPolynomial& chi, const PhasePoint& x, double t, const FlowTolerance& tol) {
    const int n = chi.dims();
    if (static_cast<int>(x.theta.size()) != n || static_cast<int>(x.action.size()) != n)
        throw DimensionError("hamiltonian_flow: dimension mismatch");
    if (chi.is_zero() || t == 0.0) return x;

    const HamiltonianEvaluator ev(chi);
    auto ws = ev.make_workspace();
    Vec d_theta(n), d_action(n);
    auto field = [&](const Vec& z, Vec& dz, double) {
        const std::span<const double> th(z.data(), n), ac(z.data() + n, n);
        ev.gradient(th, ac, d_theta, d_action, ws);
        for (int j = 0; j < n; ++j) {
            dz[j] = d_action[j];
            dz[n + j] = -d_theta[j];
        }
    };
    Vec z(2 * n);
    std::copy(x.theta.begin(), x.theta.end(), z.begin());
    std::copy(x.action.begin(), x.action.end(), z.begin() + n);
    auto stepper = odeint::make_controlled(tol.abs_tol, tol.rel_tol, odeint::runge_kutta_fehlberg78<Vec>());
    odeint::integrate_adaptive(stepper, field, z, 0.0, t, t > 0 ? tol.initial_dt : -tol.initial_dt);
    return {Vec(z.begin(), z.begin() + n), Vec(z.begin() + n, z.end())};
}

PhasePoint compose_generator_flows(const std::vector<FTPolynomial>& generators, const PhasePoint& x,
                                   const FlowTolerance& tol) {
    PhasePoint y = x;
    for (auto it = generators.rbegin(); it != generators.rend(); ++it) y = hamiltonian_flow(*it, y, 1.0, tol);
    return y;
}

double flow_jacobian_determinant(const std::vector<FTPolynomial>& generators, const PhasePoint& x, double h,
                                 const FlowTolerance& tol) {
    const int n = static_cast<int>(x.theta.size());
    Eigen::MatrixXd J(2 * n, 2 * n);
    for (int c = 0; c < 2 * n; ++c) {
        PhasePoint plus = x, minus = x;
        (c < n ? plus.theta[c] : plus.action[c - n]) += h;
        (c < n ? minus.theta[c] : minus.action[c - n]) -= h;
        const PhasePoint a = compose_generator_flows(generators, plus, tol);
        const PhasePoint b = compose_generator_flows(generators, minus, tol);
        for (int r = 0; r < n; ++r) {
            J(r, c) = (a.theta[r] - b.theta[r]) / (2 * h);
            J(n + r, c) = (a.action[r] - b.action[r]) / (2 * h);
        }
    }
    return J.determinant();
}

double action_displacement(const std::vector<FTPolynomial>& generators, const PhasePoint& x,
                           const FlowTolerance& tol) {
    const PhasePoint y = compose_generator_flows(generators, x, tol);
    double d = 0.0;
    for (std::size_t j = 0; j < x.action.size(); ++j) d = std::max(d, std::abs(y.action[j] - x.action[j]));
    return d;
}

}  // namespace nekh
