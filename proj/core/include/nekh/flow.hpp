#pragma once

#include <vector>

#include "nekh/algebra.hpp"

namespace nekh {

/// Point of T^n x R^n with unreduced angles.
struct PhasePoint {
    Vec theta;
    Vec action;
};

struct FlowTolerance {
    double abs_tol = 1e-14;
    double rel_tol = 1e-14;
    double initial_dt = 1e-3;
};

/** Time-t map of the Hamiltonian vector field X_chi = (d_I chi, -d_theta chi),
    integrated with an adaptive Runge-Kutta-Fehlberg 7(8) scheme. */
PhasePoint hamiltonian_flow(const FTPolynomial& chi, const PhasePoint& x, double t = 1.0,
                            const FlowTolerance& tol = {});

/** Phi = Phi^{chi_0} o ... o Phi^{chi_{s-1}}: the last generator acts first. */
PhasePoint compose_generator_flows(const std::vector<FTPolynomial>& generators, const PhasePoint& x,
                                   const FlowTolerance& tol = {});

/// Determinant of the central-difference Jacobian of the composed map.
double flow_jacobian_determinant(const std::vector<FTPolynomial>& generators, const PhasePoint& x,
                                 double h = 1e-6, const FlowTolerance& tol = {});

/// |Pi_I Phi(x) - I|_inf
double action_displacement(const std::vector<FTPolynomial>& generators, const PhasePoint& x,
                           const FlowTolerance& tol = {});

}  // namespace nekh
