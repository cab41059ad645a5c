#include "blowup/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>
#include <utility>

#include "blowup/error.hpp"
#include "blowup/report.hpp"

namespace blowup {

bool ExperimentResult::passed() const {
    if (!failures.empty()) return false;
    return std::all_of(reports.begin(), reports.end(), [](const RateReport& r) { return !r.asserted || r.pass; });
}

namespace {

FailureRecord describe_failure(const std::string& stage, const std::exception_ptr& error) {
    FailureRecord rec{stage, "error", ""};
    try {
        std::rethrow_exception(error);
    } catch (const SolverError& e) {
        rec.kind = "solver";
        rec.message = e.what();
    } catch (const DomainError& e) {
        rec.kind = "domain";
        rec.message = e.what();
    } catch (const ConfigError& e) {
        rec.kind = "config";
        rec.message = e.what();
    } catch (const NumericError& e) {
        rec.kind = "numeric";
        rec.message = e.what();
    } catch (const std::exception& e) {
        rec.message = e.what();
    }
    return rec;
}

struct Task {
    std::string stage;
    std::function<void()> body;
    std::exception_ptr error = nullptr;
};

// Runs the tasks on up to `jobs` threads; failures are kept per task so the
// record order does not depend on scheduling.
void run_tasks(std::vector<Task>& tasks, std::size_t jobs) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            try {
                tasks[k].body();
            } catch (...) {
                tasks[k].error = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(tasks.size(), 1));
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
}

RateReport bound_row(std::string quantity, double measured, double tolerance, std::string note) {
    RateReport r;
    r.quantity = std::move(quantity);
    r.predicted = 0.0;
    r.extrapolated = measured;
    r.relative_error = measured;
    r.tolerance = tolerance;
    r.method = "max";
    r.converged = true;
    r.pass = measured <= tolerance;
    r.note = std::move(note);
    return r;
}

double domain_center(const Domain& domain) { return domain.is_interval() ? 0.5 * (domain.a() + domain.b()) : 0.0; }

}  // namespace

ExperimentResult execute_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
    ExperimentResult res;
    res.name = cfg.name;
    const VerificationBlock& v = cfg.verification;
    const ParabolicProblem prob = cfg.parabolic();
    const HalfGrid grid = cfg.grid();
    const CapLadder ladder = cfg.cap_ladder();
    const ParabolicOptions opts = cfg.parabolic_options();
    const std::size_t steps = cfg.solver.time_steps;
    const bool need_upper = v.structure || v.uniqueness;
    const bool need_fine = v.initial_rate && v.richardson;

    std::optional<EllipticBlowup> elliptic;
    std::optional<ParabolicLadder> coarse;
    std::optional<ParabolicLadder> fine;
    std::optional<MaximalSolution> maximal;
    std::vector<Task> tasks;
    if (v.elliptic_rate) {
        tasks.push_back({"elliptic", [&] {
                             EllipticOptions eo;
                             eo.newton.tolerance = cfg.solver.newton_tolerance;
                             elliptic = solve_elliptic_blowup(cfg.elliptic(), grid, ladder, eo);
                         }});
    }
    tasks.push_back({"minimal", [&] { coarse = minimal_solution(prob, grid, cfg.times(steps), ladder, opts); }});
    if (need_fine)
        tasks.push_back(
            {"minimal_fine", [&] { fine = minimal_solution(prob, grid, cfg.times(2 * steps), ladder, opts); }});
    if (need_upper) {
        tasks.push_back({"maximal", [&] {
                             ShrinkMeshing meshing{cfg.solver.grading, cfg.solver.time_grading};
                             maximal = maximal_solution(prob, grid, cfg.times(steps), cfg.solver.eps_ladder, ladder,
                                                        opts, jobs, meshing);
                         }});
    }
    run_tasks(tasks, jobs);
    for (const Task& t : tasks)
        if (t.error) res.failures.push_back(describe_failure(t.stage, t.error));

    auto check = [&res](const std::string& stage, const std::function<void()>& body) {
        try {
            body();
        } catch (...) {
            res.failures.push_back(describe_failure(stage, std::current_exception()));
        }
    };

    if (elliptic) {
        res.elliptic = elliptic->field;
        check("elliptic_rate", [&] {
            RateOptions ro;
            ro.tolerance = v.rate_tolerance;
            res.reports.push_back(boundary_rate(elliptic->field, cfg.elliptic(), ro));
            res.reports.push_back(bound_row("elliptic_cap_monotonicity", elliptic->monotonicity_violation,
                                            v.structure_tolerance, "largest relative decrease z_n - z_2n"));
        });
    }
    if (elliptic && prob.p != 2.0) {
        check("elliptic_spread", [&] {
            EllipticOptions eo;
            eo.newton.tolerance = cfg.solver.newton_tolerance;
            RateReport row = bound_row("elliptic_spread", elliptic_solution_spread(cfg.elliptic(), grid, ladder, eo),
                                       v.gap_tolerance, "spread of independent cap ladders; uniqueness not asserted for p != 2");
            row.asserted = false;
            res.reports.push_back(std::move(row));
        });
    }
    if (coarse) res.lower = coarse->field;
    if (maximal) res.upper = maximal->field();

    if (v.initial_rate && coarse && (fine || !need_fine)) {
        check("initial_rate", [&] {
            RateOptions ro;
            ro.start = v.initial_start;
            ro.stop = v.initial_stop;
            ro.tolerance = v.rate_tolerance;
            const double x0 = v.initial_point.value_or(domain_center(prob.domain));
            if (fine) {
                RateReport r = initial_rate(richardson_in_time(coarse->field, fine->field), x0, prob, ro);
                r.note += "; Richardson in time over " + std::to_string(steps) + "/" + std::to_string(2 * steps) +
                          " steps";
                res.reports.push_back(std::move(r));
            } else {
                res.reports.push_back(initial_rate(coarse->field, x0, prob, ro));
            }
        });
    }
    if (v.boundary_rate && coarse) {
        for (double t0 : v.boundary_times) {
            check("boundary_rate", [&] {
                RateOptions ro;
                ro.tolerance = v.rate_tolerance;
                res.reports.push_back(boundary_rate(coarse->field, t0, prob, ro));
            });
        }
    }
    if (v.structure && coarse) {
        check("structure", [&] {
            res.reports.push_back(bound_row("cap_monotonicity", coarse->monotonicity_violation, v.structure_tolerance,
                                            "largest relative decrease u_n - u_2n over all nodes and times"));
            res.reports.push_back(bound_row("time_monotonicity",
                                            time_monotonicity_violation(coarse->field, grid.size()),
                                            v.structure_tolerance, "largest relative increase of u in t"));
        });
    }
    if (v.structure && coarse && maximal) {
        check("structure", [&] {
            res.reports.push_back(bound_row("shrink_monotonicity", maximal->eps_monotonicity_violation,
                                            v.structure_tolerance, "largest relative violation of u_eps1 >= u_eps2"));
            const ComparisonVerdict order = parabolic_comparison_check(maximal->field(), coarse->field);
            res.reports.push_back(bound_row("ordering", order.max_violation, v.structure_tolerance,
                                            "largest relative violation of lower <= upper on shared nodes"));
            SandwichReport sw = sandwich_check(coarse->field, maximal->field(), prob, prob.t_star);
            sw.bound_lo = v.sandwich_lo;
            sw.bound_hi = v.sandwich_hi;
            for (RateReport& row : sw.rows()) res.reports.push_back(std::move(row));
        });
    }
    if (v.uniqueness && coarse && maximal) {
        check("uniqueness", [&] {
            const GapReport gap = uniqueness_gap(coarse->field, maximal->field(), prob);
            std::ostringstream note;
            note << "eps = " << maximal->eps.back() << ", d >= 0.1 H, t >= 0.1 t*";
            if (!gap.note.empty()) note << "; " << gap.note;
            RateReport row = bound_row("uniqueness_gap", gap.value, v.gap_tolerance, note.str());
            row.asserted = gap.asserted;
            res.reports.push_back(std::move(row));
        });
    }
    return res;
}

int run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
    const ExperimentResult res = execute_experiment(cfg, jobs);
    emit_report(res, cfg.output.directory, cfg.output.slices);
    return res.exit_status();
}

}  // namespace blowup
