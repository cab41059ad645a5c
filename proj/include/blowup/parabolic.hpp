#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/discrete_operator.hpp"
#include "blowup/elliptic.hpp"
#include "blowup/geometry.hpp"
#include "blowup/karamata.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

/// u_t - Delta_p u = -b(x,t) f(u) with b = beta(t) k^p(d(x)), solved on
/// [0, t_star] with t_star < T.
struct ParabolicProblem {
    Domain domain = Domain::interval(0.0, 1.0);
    double p = 2.0;
    Nonlinearity f = Nonlinearity::power(2.0);
    WeightKernel kernel = WeightKernel::constant(2.0);
    /// Time factor beta(t); constant 1 when empty.
    std::function<double(double)> beta;
    double horizon = 1.0;  // T
    double t_star = 0.5;   // end of the solved window
    /// Optional source S(x, t) added to the right side.
    std::function<double(double, double)> source;

    double beta_at(double t) const { return beta ? beta(t) : 1.0; }
    /// b(x_i, t) on the grid (zero at the Dirichlet node).
    std::vector<double> absorption_on(const HalfGrid& grid, double t) const;
    /// Elliptic problem with the weight frozen at time t.
    EllipticProblem frozen_at(double t) const;
};

/// t_j = t_end (j/steps)^grading, j = 0..steps.
std::vector<double> build_time_grid(double t_end, std::size_t steps, double grading = 2.0);

/// Discrete trajectory: values[j][i] at times[j] and grid node i.
struct SpaceTimeField {
    HalfGrid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    double cap = 0.0;
    /// Shrink parameter of the domain/time window (0 for the full problem).
    double shrink = 0.0;
    bool blowup = false;
    /// Solver diagnostics: Newton iterations, positivity projections and
    /// steps that had to be split after a Newton failure.
    std::size_t newton_iterations = 0;
    std::size_t projections = 0;
    std::size_t split_steps = 0;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    /// Index of the time node nearest to t.
    std::size_t nearest_time(double t) const;
    /// Index of the grid node nearest to the physical coordinate x.
    std::size_t nearest_node(double x) const;
};

/// Time grid of the shifted window [eps, times.back()]: nodes t >= 2 eps are
/// kept (shared with `times`), the rest is re-meshed with as many steps,
/// graded toward eps with the given exponent.
std::vector<double> shifted_time_grid(const std::vector<double>& times, double eps, double grading);

/// Shared nodes of two fields: the common prefix of spatial nodes (identical
/// coordinates) and the pairs of time indices with identical times.
struct FieldAlignment {
    std::size_t nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> times;
};
FieldAlignment align_fields(const SpaceTimeField& a, const SpaceTimeField& b);

/// First time index past fraction of the window [times.front(), times.back()].
std::size_t interior_time_begin(const std::vector<double>& times, double fraction);

/// First time index j >= 1 from which every step satisfies
/// dt_j <= resolution * (t_j - times.front()).
std::size_t resolved_time_begin(const std::vector<double>& times, double resolution);

struct ParabolicOptions {
    NewtonOptions newton;
    std::optional<double> regularization;
    /// A failed step is retried as two half steps, recursively up to this depth.
    std::size_t max_halvings = 8;
};

struct StepResult {
    std::vector<double> values;
    NewtonStats newton;
    std::size_t substeps = 1;
};

/// Backward-Euler step from `state` at t_new - dt to t_new with Dirichlet
/// value `boundary`. Throws SolverError when retries are exhausted.
StepResult step_implicit(const ParabolicProblem& prob, const HalfGrid& grid, const std::vector<double>& state,
                         double t_new, double dt, double boundary, const ParabolicOptions& opts = {});

/// Backward-Euler trajectory over `times` from `initial` with boundary data g(t).
SpaceTimeField integrate_trajectory(const ParabolicProblem& prob, const HalfGrid& grid,
                                    const std::vector<double>& times, std::vector<double> initial,
                                    const std::function<double(double)>& boundary,
                                    const ParabolicOptions& opts = {});

/// Capped problem: initial and boundary data equal to n.
SpaceTimeField solve_capped(const ParabolicProblem& prob, const HalfGrid& grid, const std::vector<double>& times,
                            double cap, const ParabolicOptions& opts = {});

struct ParabolicLadder {
    SpaceTimeField field;
    std::vector<double> caps;
    std::vector<double> interior_changes;
    /// Largest relative decrease u_n - u_{2n} over all nodes and times.
    double monotonicity_violation = 0.0;
    bool converged = false;
};

/// Minimal solution: capped trajectories along the cap ladder until the
/// interior set of the ladder (fixed fractions of distance and time window)
/// stabilizes.
ParabolicLadder minimal_solution(const ParabolicProblem& prob, const HalfGrid& grid,
                                 const std::vector<double>& times, const CapLadder& ladder = {},
                                 const ParabolicOptions& opts = {});

struct MaximalSolution {
    /// One minimal solution per shrink parameter, in ladder order.
    std::vector<ParabolicLadder> rungs;
    std::vector<double> eps;  // shrink parameters, decreasing
    /// Largest relative violation of u^{eps1} >= u^{eps2} (eps1 > eps2).
    double eps_monotonicity_violation = 0.0;
    const SpaceTimeField& field() const { return rungs.back().field; }
};

/// Mesh gradings used to re-mesh the shrunken problems.
struct ShrinkMeshing {
    double grading = 3.0;
    double time_grading = 3.0;
};

/// Maximal solution by domain shrinking: for each eps (decreasing), the
/// minimal solution on {d > eps} x (eps, t_end]. The shrunken grids keep the
/// interior nodes and later time nodes of (grid, times), so the fields share
/// nodes with full-problem fields. Rungs run on up to `jobs` threads.
MaximalSolution maximal_solution(const ParabolicProblem& prob, const HalfGrid& grid,
                                 const std::vector<double>& times, const std::vector<double>& eps_ladder,
                                 const CapLadder& ladder = {}, const ParabolicOptions& opts = {},
                                 std::size_t jobs = 1, const ShrinkMeshing& meshing = {});

/// Nodal ordering upper >= lower on the shared nodes and times with
/// d >= d_min and t >= t_min. Violations are relative to max(1, |upper|).
ComparisonVerdict parabolic_comparison_check(const SpaceTimeField& upper, const SpaceTimeField& lower,
                                             double tol = 1e-8, double d_min = 0.0, double t_min = 0.0);

/// Min and max of the scaled backward-Euler residual over all steps.
std::pair<double, double> parabolic_residual_range(const SpaceTimeField& u, const ParabolicProblem& prob);

/// Largest relative increase u(t_j) - u(t_{j-1}) over interior nodes.
double time_monotonicity_violation(const SpaceTimeField& u, std::size_t i_end);

struct WeakResidual {
    double value = 0.0;
    /// Sum of the magnitudes of all contributions (for relative statements).
    double scale = 0.0;
};

/// Discrete weak form
///   sum V u(T) phi(T) + sum dt [ sum_e F_e dphi_e + sum V b f(u) phi - sum V S phi ]
///     - sum_j sum_i V u^{j-1} (phi^j - phi^{j-1})
/// on the half domain. `test[j][i]` must be nonnegative and vanish at the
/// Dirichlet node and on the first time slice (DomainError otherwise).
WeakResidual weak_form_residual(const SpaceTimeField& u, const ParabolicProblem& prob,
                                const std::vector<std::vector<double>>& test);

/// Field on the coarse time grid: (2^order fine - coarse)/(2^order - 1) using
/// fine slice 2j for coarse slice j. Grids must be nested.
SpaceTimeField richardson_in_time(const SpaceTimeField& coarse, const SpaceTimeField& fine, double order = 1.0);

}  // namespace blowup
