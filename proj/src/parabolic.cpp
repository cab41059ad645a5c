#include "blowup/parabolic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "blowup/error.hpp"

namespace blowup {

std::vector<double> ParabolicProblem::absorption_on(const HalfGrid& grid, double t) const {
    const double amplitude = beta_at(t);
    std::vector<double> a(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.boundary_index(); ++i)
        a[i] = amplitude * std::pow(kernel(grid.distance[i]), p);
    return a;
}

EllipticProblem ParabolicProblem::frozen_at(double t) const {
    EllipticProblem e;
    e.domain = domain;
    e.p = p;
    e.f = f;
    e.kernel = kernel;
    e.beta = beta_at(t);
    return e;
}

std::vector<double> build_time_grid(double t_end, std::size_t steps, double grading) {
    if (!(t_end > 0.0)) throw ConfigError("time grid end must be positive");
    if (steps < 1) throw ConfigError("time grid needs at least one step");
    if (!(grading >= 1.0)) throw ConfigError("time grading must be >= 1");
    std::vector<double> t(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j)
        t[j] = t_end * std::pow(static_cast<double>(j) / static_cast<double>(steps), grading);
    t.back() = t_end;
    return t;
}


std::size_t SpaceTimeField::nearest_time(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    if (it == times.end()) return times.size() - 1;
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    return (t - times[j - 1] <= times[j] - t) ? j - 1 : j;
}

std::size_t SpaceTimeField::nearest_node(double x) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid.coordinate[i] - x) < std::abs(grid.coordinate[best] - x)) best = i;
    return best;
}

std::size_t interior_time_begin(const std::vector<double>& times, double fraction) {
    const double t_min = times.front() + fraction * (times.back() - times.front());
    std::size_t j = 1;
    while (j + 1 < times.size() && times[j] < t_min) ++j;
    return j;
}

std::size_t resolved_time_begin(const std::vector<double>& times, double resolution) {
    std::size_t j = times.size() - 1;
    while (j > 1 && times[j] - times[j - 1] <= resolution * (times[j] - times.front())) --j;
    return std::min(j + 1, times.size() - 1);
}

namespace {

struct StepContext {
    const ParabolicProblem& prob;
    const HalfGrid& grid;
    const ParabolicOptions& opts;
};

NewtonStats solve_step(const StepContext& ctx, const std::vector<double>& prev, std::vector<double>& next,
                       double t_new, double dt, double boundary) {
    const auto absorption = ctx.prob.absorption_on(ctx.grid, t_new);
    std::vector<double> source;
    if (ctx.prob.source) {
        source.resize(ctx.grid.size());
        for (std::size_t i = 0; i < ctx.grid.size(); ++i) source[i] = ctx.prob.source(ctx.grid.coordinate[i], t_new);
    }
    DiscreteSystem sys;
    sys.grid = &ctx.grid;
    sys.p = ctx.prob.p;
    sys.regularization = ctx.opts.regularization.value_or(ctx.grid.min_spacing());
    sys.f = &ctx.prob.f;
    sys.absorption = absorption;
    sys.source = source;
    sys.previous = prev;
    sys.inv_dt = 1.0 / dt;
    sys.boundary_value = boundary;
    next = prev;
    return solve_newton(sys, next, ctx.opts.newton);
}

// Advances prev from t_new - dt to t_new, splitting the step on failure.
bool advance(const StepContext& ctx, const std::vector<double>& prev, std::vector<double>& next, double t_new,
             double dt, double boundary, std::size_t depth, StepResult& log) {
    NewtonStats stats = solve_step(ctx, prev, next, t_new, dt, boundary);
    log.newton.iterations += stats.iterations;
    log.newton.projections += stats.projections;
    log.newton.residual = std::max(log.newton.residual, stats.residual);
    if (stats.converged) return true;
    if (depth >= ctx.opts.max_halvings) return false;
    std::vector<double> mid;
    const double half = 0.5 * dt;
    log.substeps += 1;
    if (!advance(ctx, prev, mid, t_new - half, half, boundary, depth + 1, log)) return false;
    return advance(ctx, mid, next, t_new, half, boundary, depth + 1, log);
}

}  // namespace

StepResult step_implicit(const ParabolicProblem& prob, const HalfGrid& grid, const std::vector<double>& state,
                         double t_new, double dt, double boundary, const ParabolicOptions& opts) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    if (state.size() != grid.size()) throw DomainError("state does not match grid");
    for (double v : state)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("state must be finite and nonnegative");
    const StepContext ctx{prob, grid, opts};
    StepResult out;
    if (!advance(ctx, state, out.values, t_new, dt, boundary, 0, out)) {
        std::ostringstream msg;
        msg << "implicit step to t = " << t_new << " failed after " << opts.max_halvings
            << " step halvings (scaled residual " << out.newton.residual << ", " << out.newton.projections
            << " positivity projections)";
        throw SolverError(msg.str());
    }
    out.newton.converged = true;
    return out;
}

SpaceTimeField integrate_trajectory(const ParabolicProblem& prob, const HalfGrid& grid,
                                    const std::vector<double>& times, std::vector<double> initial,
                                    const std::function<double(double)>& boundary, const ParabolicOptions& opts) {
    if (times.size() < 2) throw ConfigError("time grid needs at least two nodes");
    if (initial.size() != grid.size()) throw DomainError("initial data do not match grid");
    SpaceTimeField out;
    out.grid = grid;
    out.times = times;
    out.values.reserve(times.size());
    initial.back() = boundary(times.front());
    out.values.push_back(std::move(initial));
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double dt = times[j] - times[j - 1];
        if (!(dt > 0.0)) throw ConfigError("time grid must be strictly increasing");
        StepResult step = step_implicit(prob, grid, out.values.back(), times[j], dt, boundary(times[j]), opts);
        out.newton_iterations += step.newton.iterations;
        out.projections += step.newton.projections;
        if (step.substeps > 1) ++out.split_steps;
        out.values.push_back(std::move(step.values));
    }
    return out;
}

SpaceTimeField solve_capped(const ParabolicProblem& prob, const HalfGrid& grid, const std::vector<double>& times,
                            double cap, const ParabolicOptions& opts) {
    if (!(cap > 0.0)) throw DomainError("cap must be positive");
    SpaceTimeField out =
        integrate_trajectory(prob, grid, times, std::vector<double>(grid.size(), cap), [cap](double) { return cap; }, opts);
    out.cap = cap;
    return out;
}

ParabolicLadder minimal_solution(const ParabolicProblem& prob, const HalfGrid& grid, const std::vector<double>& times,
                                 const CapLadder& ladder, const ParabolicOptions& opts) {
    if (!(ladder.ratio > 1.0) || !(ladder.start > 0.0)) throw ConfigError("cap ladder must increase");
    ParabolicLadder out;
    double cap = ladder.start;
    SpaceTimeField current = solve_capped(prob, grid, times, cap, opts);
    out.caps.push_back(cap);
    const std::size_t i_end = interior_node_end(grid, ladder.interior_fraction);
    const std::size_t j_begin = interior_time_begin(times, ladder.interior_fraction);
    for (std::size_t rung = 1; rung < ladder.max_rungs; ++rung) {
        cap *= ladder.ratio;
        SpaceTimeField next = solve_capped(prob, grid, times, cap, opts);
        out.caps.push_back(cap);
        double diff = 0.0;
        double peak = 0.0;
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto& a = current.values[j];
            const auto& b = next.values[j];
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double drop = (a[i] - b[i]) / std::max(1.0, std::abs(b[i]));
                out.monotonicity_violation = std::max(out.monotonicity_violation, drop);
            }
            if (j < j_begin) continue;
            for (std::size_t i = 0; i < i_end; ++i) {
                diff = std::max(diff, std::abs(b[i] - a[i]));
                peak = std::max(peak, std::abs(b[i]));
            }
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
        msg << "parabolic cap ladder exhausted after " << out.caps.size() << " rungs (last interior change "
            << out.interior_changes.back() << "); increase mesh grading or ladder length";
        throw SolverError(msg.str());
    }
    return out;
}

std::vector<double> shifted_time_grid(const std::vector<double>& times, double eps, double grading) {
    if (!(eps > times.front())) throw DomainError("shifted window must start after the initial time");
    if (!(grading >= 1.0)) throw ConfigError("time grading must be >= 1");
    const auto keep = std::lower_bound(times.begin(), times.end(), 2.0 * eps);
    if (times.end() - keep < 4) throw DomainError("shrink parameter leaves fewer than four time steps");
    const std::size_t removed = static_cast<std::size_t>(keep - times.begin());
    const std::size_t steps = std::max<std::size_t>(removed, 4);
    const double t_first = *keep;
    std::vector<double> out;
    out.reserve(steps + static_cast<std::size_t>(times.end() - keep));
    for (std::size_t j = 0; j < steps; ++j)
        out.push_back(eps + (t_first - eps) * std::pow(static_cast<double>(j) / static_cast<double>(steps), grading));
    out.insert(out.end(), keep, times.end());
    return out;
}

namespace {

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

FieldAlignment align_fields(const SpaceTimeField& a, const SpaceTimeField& b) {
    FieldAlignment al;
    const std::size_t n = std::min(a.grid.size(), b.grid.size());
    while (al.nodes < n && same_value(a.grid.y[al.nodes], b.grid.y[al.nodes])) ++al.nodes;
    std::size_t ja = 0;
    std::size_t jb = 0;
    while (ja < a.times.size() && jb < b.times.size()) {
        if (same_value(a.times[ja], b.times[jb])) {
            al.times.emplace_back(ja++, jb++);
        } else if (a.times[ja] < b.times[jb]) {
            ++ja;
        } else {
            ++jb;
        }
    }
    return al;
}

MaximalSolution maximal_solution(const ParabolicProblem& prob, const HalfGrid& grid, const std::vector<double>& times,
                                 const std::vector<double>& eps_ladder, const CapLadder& ladder,
                                 const ParabolicOptions& opts, std::size_t jobs, const ShrinkMeshing& meshing) {
    if (eps_ladder.empty()) throw ConfigError("shrink ladder is empty");
    const double half = grid.distance.front();
    for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
        if (!(eps_ladder[k] > 0.0)) throw ConfigError("shrink parameters must be positive");
        if (k > 0 && !(eps_ladder[k] < eps_ladder[k - 1])) throw ConfigError("shrink ladder must decrease");
        if (!(2.0 * eps_ladder[k] < half)) throw DomainError("shrink parameter leaves no interior");
    }

    MaximalSolution out;
    out.rungs.resize(eps_ladder.size());
    std::vector<std::exception_ptr> errors(eps_ladder.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < eps_ladder.size(); k = next++) {
            try {
                const double eps = eps_ladder[k];
                const HalfGrid sub = grid.shrunk(eps, meshing.grading);
                const auto sub_times = shifted_time_grid(times, eps, meshing.time_grading);
                ParabolicLadder rung = minimal_solution(prob, sub, sub_times, ladder, opts);
                rung.field.shrink = eps;
                out.rungs[k] = std::move(rung);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, eps_ladder.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    out.eps = eps_ladder;
    for (std::size_t k = 0; k + 1 < eps_ladder.size(); ++k) {
        const SpaceTimeField& outer = out.rungs[k].field;  // larger eps, smaller domain
        const double t_min = outer.times.front() + ladder.interior_fraction * (outer.times.back() - outer.times.front());
        const auto verdict = parabolic_comparison_check(outer, out.rungs[k + 1].field, 0.0,
                                                        ladder.interior_fraction * half, t_min);
        out.eps_monotonicity_violation = std::max(out.eps_monotonicity_violation, verdict.max_violation);
    }
    return out;
}

ComparisonVerdict parabolic_comparison_check(const SpaceTimeField& upper, const SpaceTimeField& lower, double tol,
                                             double d_min, double t_min) {
    ComparisonVerdict v;
    const FieldAlignment al = align_fields(upper, lower);
    if (al.nodes == 0 || al.times.empty()) throw DomainError("comparison needs fields with shared nodes and times");
    for (const auto& [ja, jb] : al.times) {
        if (upper.times[ja] < t_min) continue;
        const auto& a = upper.values[ja];
        const auto& b = lower.values[jb];
        for (std::size_t i = 0; i < al.nodes; ++i) {
            if (upper.grid.distance[i] < d_min) continue;
            const double viol = (b[i] - a[i]) / std::max(1.0, std::abs(a[i]));
            if (viol > v.max_violation) {
                v.max_violation = viol;
                v.worst_node = i;
                v.worst_time = ja;
            }
        }
    }
    v.pass = v.max_violation <= tol;
    if (!v.pass) {
        std::ostringstream rep;
        rep << "ordering violated by " << v.max_violation << " at node " << v.worst_node << ", t = "
            << upper.times[v.worst_time];
        v.report = rep.str();
    }
    return v;
}

namespace {

// Calls visit(j, residual, scale) with the backward-Euler rows of step j.
template <class Visit>
void for_each_step_residual(const SpaceTimeField& u, const ParabolicProblem& prob, Visit visit) {
    const HalfGrid& grid = u.grid;
    const std::size_t m = grid.boundary_index();
    std::vector<double> r(m), s(m), source;
    for (std::size_t j = 1; j < u.times.size(); ++j) {
        const double t = u.times[j];
        const auto absorption = prob.absorption_on(grid, t);
        source.clear();
        if (prob.source) {
            source.resize(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) source[i] = prob.source(grid.coordinate[i], t);
        }
        DiscreteSystem sys;
        sys.grid = &grid;
        sys.p = prob.p;
        sys.regularization = grid.min_spacing();
        sys.f = &prob.f;
        sys.absorption = absorption;
        sys.source = source;
        sys.previous = u.values[j - 1];
        sys.inv_dt = 1.0 / (t - u.times[j - 1]);
        sys.boundary_value = u.values[j].back();
        evaluate_residual(sys, u.values[j], r, s);
        visit(j, r, s);
    }
}

}  // namespace

std::pair<double, double> parabolic_residual_range(const SpaceTimeField& u, const ParabolicProblem& prob) {
    double lo = 0.0;
    double hi = 0.0;
    for_each_step_residual(u, prob, [&](std::size_t, const std::vector<double>& r, const std::vector<double>& s) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double v = r[i] / std::max(s[i], 1e-300);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    });
    return {lo, hi};
}

double time_monotonicity_violation(const SpaceTimeField& u, std::size_t i_end) {
    double worst = 0.0;
    const std::size_t nodes = std::min(i_end, u.grid.size());
    for (std::size_t j = 1; j < u.values.size(); ++j)
        for (std::size_t i = 0; i < nodes; ++i) {
            const double rise = (u.values[j][i] - u.values[j - 1][i]) / std::max(1.0, std::abs(u.values[j - 1][i]));
            worst = std::max(worst, rise);
        }
    return worst;
}

WeakResidual weak_form_residual(const SpaceTimeField& u, const ParabolicProblem& prob,
                                const std::vector<std::vector<double>>& test) {
    if (test.size() != u.times.size()) throw DomainError("test function needs one slice per time node");
    const std::size_t m = u.grid.boundary_index();
    for (std::size_t j = 0; j < test.size(); ++j) {
        if (test[j].size() != u.grid.size()) throw DomainError("test slice does not match grid");
        for (std::size_t i = 0; i < test[j].size(); ++i) {
            if (test[j][i] < 0.0) throw DomainError("test function must be nonnegative");
            if ((j == 0 || i == m) && test[j][i] != 0.0)
                throw DomainError("test function must vanish on the parabolic boundary");
        }
    }
    // Summation by parts in time and space (the test vanishes at t_0 and on
    // the Dirichlet node) turns the discrete weak form into
    // sum_j dt_j sum_i test_i^j R_i^j with R the backward-Euler rows.
    WeakResidual out;
    for_each_step_residual(u, prob, [&](std::size_t j, const std::vector<double>& r, const std::vector<double>& s) {
        const double dt = u.times[j] - u.times[j - 1];
        for (std::size_t i = 0; i < m; ++i) {
            out.value += dt * test[j][i] * r[i];
            out.scale += dt * test[j][i] * s[i];
        }
    });
    return out;
}

SpaceTimeField richardson_in_time(const SpaceTimeField& coarse, const SpaceTimeField& fine, double order) {
    if (fine.steps() != 2 * coarse.steps()) throw DomainError("fine time grid must have twice the steps");
    if (fine.grid.size() != coarse.grid.size()) throw DomainError("fields must share the spatial grid");
    const double w = std::pow(2.0, order);
    SpaceTimeField out = coarse;
    for (std::size_t j = 0; j < coarse.times.size(); ++j) {
        if (std::abs(fine.times[2 * j] - coarse.times[j]) > 1e-12 * std::max(1.0, coarse.times[j]))
            throw DomainError("time grids are not nested");
        for (std::size_t i = 0; i < coarse.grid.size(); ++i)
            out.values[j][i] = (w * fine.values[2 * j][i] - coarse.values[j][i]) / (w - 1.0);
    }
    return out;
}

}  // namespace blowup
