#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blowup/geometry.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

/// One nonlinear system of the conservative radial p-Laplacian scheme on a
/// HalfGrid:
///
///   V_i (u_i - prev_i)/dt - (F_{i+1/2} - F_{i-1/2}) + V_i a_i f(u_i) - V_i S_i = 0
///
/// for i < M, with zero flux at y = 0 and u_M = boundary_value. Edge flux
/// F = y^{N-1} (g^2 + eps^2)^{(p-2)/2} g, g the edge difference quotient.
/// dt = inf (inv_dt = 0) gives the elliptic system.
struct DiscreteSystem {
    const HalfGrid* grid = nullptr;
    double p = 2.0;
    double regularization = 0.0;
    const Nonlinearity* f = nullptr;
    std::span<const double> absorption;  // a_i, one per node
    std::span<const double> source;      // S_i, empty for none
    std::span<const double> previous;    // prev_i, empty when inv_dt == 0
    double inv_dt = 0.0;
    double boundary_value = 0.0;
};

/// Residual rows and their magnitude scales: the sum of absolute
/// contributions, with each edge flux also counted at slope * (|u_i| + |u_{i+1}|)
/// so that nearly flat states are not judged below rounding level.
void evaluate_residual(const DiscreteSystem& sys, std::span<const double> u, std::span<double> residual,
                       std::span<double> scale);

/// max_i |R_i| / scale_i.
double scaled_residual_norm(const DiscreteSystem& sys, std::span<const double> u);

struct NewtonOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 200;
};

struct NewtonStats {
    std::size_t iterations = 0;
    double residual = 0.0;
    std::size_t projections = 0;
    bool converged = false;
};

/// Damped Newton with backtracking on the scaled residual. `u` holds the
/// initial guess and receives the solution; u.back() is set to the boundary
/// value. Nonpositive trial entries are projected back to half the previous
/// value and counted.
NewtonStats solve_newton(const DiscreteSystem& sys, std::vector<double>& u, const NewtonOptions& opts = {});

/// Thomas algorithm; sub[0] and super[n-1] are ignored. rhs is overwritten
/// with the solution.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag, std::span<const double> super,
                       std::span<double> rhs);

}  // namespace blowup
