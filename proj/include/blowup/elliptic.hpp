#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/discrete_operator.hpp"
#include "blowup/geometry.hpp"
#include "blowup/karamata.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

/// Delta_p z = beta k^p(d(x)) f(z) (+ optional source on the right side).
struct EllipticProblem {
    Domain domain = Domain::interval(0.0, 1.0);
    double p = 2.0;
    Nonlinearity f = Nonlinearity::power(2.0);
    WeightKernel kernel = WeightKernel::constant(2.0);
    double beta = 1.0;
    /// Optional S(x): solves -Delta_p z + beta k^p f(z) = S.
    std::function<double(double)> source;

    /// beta k^p(d_i) per node of the grid (zero at the Dirichlet node).
    std::vector<double> absorption_on(const HalfGrid& grid) const;
};

/// Geometric cap ladder n_j = start * ratio^j and the interior stopping rule.
struct CapLadder {
    double start = 10.0;
    double ratio = 2.0;
    std::size_t max_rungs = 80;
    /// Stop when the interior max-difference between consecutive rungs falls
    /// below rel_tol times the interior max-value.
    double rel_tol = 1e-6;
    /// The interior set holds nodes with d >= interior_fraction * H (and, for
    /// trajectories, times past interior_fraction of the window). The discrete
    /// problem has no finite large solution: every node grows without bound as
    /// n -> inf, with a relative drift that decays like 1/d away from the
    /// boundary, so stabilization is only meaningful at a fixed distance.
    double interior_fraction = 0.05;
};

/// Exclusive end of the nodes with d >= fraction * H (at least one node).
std::size_t interior_node_end(const HalfGrid& grid, double fraction);

/// Exclusive end of the nodes whose local spacing is at most resolution * d,
/// i.e. where the discrete boundary profile is resolved.
std::size_t resolved_node_end(const HalfGrid& grid, double resolution);

/// Discrete field on a half grid; values.back() is the Dirichlet value.
struct GridFunction {
    HalfGrid grid;
    std::vector<double> values;
    double cap = 0.0;
    bool blowup = false;  // limit of a cap ladder
    NewtonStats newton;

};

struct EllipticOptions {
    NewtonOptions newton;
    /// Regularization of |grad u|^{p-2}; defaults to the smallest spacing.
    std::optional<double> regularization;
};

/// Dirichlet problem with boundary value `cap`. `guess` (same grid) seeds
/// Newton; otherwise the constant cap is used.
GridFunction solve_elliptic_capped(const EllipticProblem& prob, const HalfGrid& grid, double cap,
                                   const GridFunction* guess = nullptr, const EllipticOptions& opts = {});

struct EllipticBlowup {
    GridFunction field;
    std::vector<double> caps;
    std::vector<double> interior_changes;
    /// Largest relative decrease between consecutive rungs (cap monotonicity).
    double monotonicity_violation = 0.0;
    bool converged = false;
};

/// Monotone limit of capped solutions along the ladder. Throws SolverError
/// when the ladder is exhausted before the interior stabilizes.
EllipticBlowup solve_elliptic_blowup(const EllipticProblem& prob, const HalfGrid& grid,
                                     const CapLadder& ladder = {}, const EllipticOptions& opts = {});

struct ComparisonVerdict {
    bool pass = true;
    bool preconditions_hold = true;
    double max_violation = 0.0;
    std::size_t worst_node = 0;
    std::size_t worst_time = 0;
    std::string report;
};

/// Checks upper >= lower - tol at every node (violation measured relative to
/// max(1, |upper|)). Also verifies the residual signs of both fields against
/// `context` and the boundary ordering; failures are recorded in the verdict.
ComparisonVerdict elliptic_comparison_check(const GridFunction& upper, const GridFunction& lower,
                                            const EllipticProblem& context, double tol = 1e-8);

/// Largest relative difference, over the interior node set, between two blow-up
/// limits computed along independent cap ladders (the given one and one with
/// 1.5x start and ratio). Reported where uniqueness is not asserted (p != 2).
double elliptic_solution_spread(const EllipticProblem& prob, const HalfGrid& grid, const CapLadder& ladder = {},
                                const EllipticOptions& opts = {});

/// Signed residual extremes of a field against a problem: min/max of R_i/scale_i.
std::pair<double, double> elliptic_residual_range(const GridFunction& u, const EllipticProblem& prob);

}  // namespace blowup
