#include "blowup/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

std::vector<double> EllipticProblem::absorption_on(const HalfGrid& grid) const {
    std::vector<double> a(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.boundary_index(); ++i)
        a[i] = beta * std::pow(kernel(grid.distance[i]), p);
    return a;
}

std::size_t interior_node_end(const HalfGrid& grid, double fraction) {
    const double d_min = fraction * grid.distance.front();
    std::size_t end = 0;
    while (end < grid.boundary_index() && grid.distance[end] >= d_min) ++end;
    return std::max<std::size_t>(end, 1);
}


std::size_t resolved_node_end(const HalfGrid& grid, double resolution) {
    std::size_t end = 0;
    while (end < grid.boundary_index()) {
        const double left = end > 0 ? grid.spacing[end - 1] : 0.0;
        const double local = std::max(left, grid.spacing[end]);
        if (local > resolution * grid.distance[end]) break;
        ++end;
    }
    return std::max<std::size_t>(end, 1);
}

namespace {

std::vector<double> source_on(const EllipticProblem& prob, const HalfGrid& grid) {
    if (!prob.source) return {};
    std::vector<double> s(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = prob.source(grid.coordinate[i]);
    return s;
}

DiscreteSystem make_system(const EllipticProblem& prob, const HalfGrid& grid, const std::vector<double>& absorption,
                           const std::vector<double>& source, double boundary, const EllipticOptions& opts) {
    DiscreteSystem sys;
    sys.grid = &grid;
    sys.p = prob.p;
    sys.regularization = opts.regularization.value_or(grid.min_spacing());
    sys.f = &prob.f;
    sys.absorption = absorption;
    sys.source = source;
    sys.boundary_value = boundary;
    return sys;
}

}  // namespace

GridFunction solve_elliptic_capped(const EllipticProblem& prob, const HalfGrid& grid, double cap,
                                   const GridFunction* guess, const EllipticOptions& opts) {
    if (!(cap > 0.0)) throw DomainError("boundary cap must be positive");
    if (!(prob.p > 1.0)) throw ConfigError("p must exceed 1");
    const auto absorption = prob.absorption_on(grid);
    const auto source = source_on(prob, grid);
    const auto sys = make_system(prob, grid, absorption, source, cap, opts);

    GridFunction out;
    out.grid = grid;
    out.cap = cap;
    if (guess && guess->values.size() == grid.size())
        out.values = guess->values;
    else
        out.values.assign(grid.size(), cap);
    out.newton = solve_newton(sys, out.values, opts.newton);
    if (!out.newton.converged) {
        // restart from the constant upper solution
        out.values.assign(grid.size(), cap);
        NewtonOptions longer = opts.newton;
        longer.max_iterations *= 4;
        out.newton = solve_newton(sys, out.values, longer);
    }
    if (!out.newton.converged) {
        std::ostringstream msg;
        msg << "elliptic Newton failed for cap " << cap << ": scaled residual " << out.newton.residual
            << " after " << out.newton.iterations << " iterations (" << out.newton.projections
            << " positivity projections)";
        throw SolverError(msg.str());
    }
    return out;
}

EllipticBlowup solve_elliptic_blowup(const EllipticProblem& prob, const HalfGrid& grid, const CapLadder& ladder,
                                     const EllipticOptions& opts) {
    if (!(ladder.ratio > 1.0) || !(ladder.start > 0.0)) throw ConfigError("cap ladder must increase");
    EllipticBlowup out;
    double cap = ladder.start;
    GridFunction current = solve_elliptic_capped(prob, grid, cap, nullptr, opts);
    out.caps.push_back(cap);
    for (std::size_t rung = 1; rung < ladder.max_rungs; ++rung) {
        cap *= ladder.ratio;
        GridFunction next = solve_elliptic_capped(prob, grid, cap, &current, opts);
        out.caps.push_back(cap);
        const std::size_t end = interior_node_end(grid, ladder.interior_fraction);
        double diff = 0.0;
        double peak = 0.0;
        for (std::size_t i = 0; i < end; ++i) {
            diff = std::max(diff, std::abs(next.values[i] - current.values[i]));
            peak = std::max(peak, std::abs(next.values[i]));
        }
        for (std::size_t i = 0; i < grid.boundary_index(); ++i) {
            const double drop = (current.values[i] - next.values[i]) / std::max(1.0, std::abs(next.values[i]));
            out.monotonicity_violation = std::max(out.monotonicity_violation, drop);
        }
        out.interior_changes.push_back(diff / std::max(peak, 1e-300));
        current = std::move(next);
        if (out.interior_changes.back() < ladder.rel_tol) {
            out.converged = true;
            break;
        }
    }
    current.blowup = true;
    out.field = std::move(current);
    if (!out.converged) {
        std::ostringstream msg;
        msg << "cap ladder exhausted after " << out.caps.size() << " rungs (last interior change "
            << out.interior_changes.back() << "); increase mesh grading or ladder length";
        throw SolverError(msg.str());
    }
    return out;
}

double elliptic_solution_spread(const EllipticProblem& prob, const HalfGrid& grid, const CapLadder& ladder,
                                const EllipticOptions& opts) {
    CapLadder other = ladder;
    other.start *= 1.5;
    other.ratio *= 1.5;
    const EllipticBlowup a = solve_elliptic_blowup(prob, grid, ladder, opts);
    const EllipticBlowup b = solve_elliptic_blowup(prob, grid, other, opts);
    double spread = 0.0;
    for (std::size_t i = 0; i < interior_node_end(grid, ladder.interior_fraction); ++i)
        spread = std::max(spread, std::abs(a.field.values[i] - b.field.values[i]) / b.field.values[i]);
    return spread;
}

std::pair<double, double> elliptic_residual_range(const GridFunction& u, const EllipticProblem& prob) {
    const auto absorption = prob.absorption_on(u.grid);
    const auto source = source_on(prob, u.grid);
    const auto sys = make_system(prob, u.grid, absorption, source, u.values.back(), {});
    const std::size_t m = u.grid.boundary_index();
    std::vector<double> r(m), s(m);
    evaluate_residual(sys, u.values, r, s);
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double v = r[i] / std::max(s[i], 1e-300);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

ComparisonVerdict elliptic_comparison_check(const GridFunction& upper, const GridFunction& lower,
                                            const EllipticProblem& context, double tol) {
    if (upper.values.size() != lower.values.size()) throw DomainError("comparison needs fields on the same grid");
    ComparisonVerdict v;
    std::ostringstream rep;
    const auto [upper_lo, upper_hi] = elliptic_residual_range(upper, context);
    const auto [lower_lo, lower_hi] = elliptic_residual_range(lower, context);
    (void)upper_hi;
    (void)lower_lo;
    if (upper_lo < -tol) {
        v.preconditions_hold = false;
        rep << "upper field is not a discrete upper solution (min scaled residual " << upper_lo << "); ";
    }
    if (lower_hi > tol) {
        v.preconditions_hold = false;
        rep << "lower field is not a discrete lower solution (max scaled residual " << lower_hi << "); ";
    }
    if (upper.values.back() < lower.values.back()) {
        v.preconditions_hold = false;
        rep << "boundary data are not ordered; ";
    }
    for (std::size_t i = 0; i < upper.values.size(); ++i) {
        const double viol = (lower.values[i] - upper.values[i]) / std::max(1.0, std::abs(upper.values[i]));
        if (viol > v.max_violation) {
            v.max_violation = viol;
            v.worst_node = i;
        }
    }
    v.pass = v.max_violation <= tol;
    if (!v.pass)
        rep << "ordering violated by " << v.max_violation << " at node " << v.worst_node << " (x = "
            << upper.grid.coordinate[v.worst_node] << ")";
    v.report = rep.str();
    return v;
}

}  // namespace blowup
