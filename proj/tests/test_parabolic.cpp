#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blowup/error.hpp"
#include "blowup/parabolic.hpp"

using namespace blowup;

namespace {

ParabolicProblem square_problem() {
    ParabolicProblem prob;
    prob.domain = Domain::interval(0.0, 1.0);
    prob.f = Nonlinearity::power(2.0);
    prob.kernel = WeightKernel::constant(2.0);
    prob.horizon = 1.0;
    prob.t_star = 0.5;
    return prob;
}

// u = e^t (2 + cos(2 pi (x - 1/2))) solves u_t - u_xx + u^2 = S
double manufactured(double x, double t) { return std::exp(t) * (2.0 + std::cos(2.0 * std::numbers::pi * (x - 0.5))); }

double manufactured_source(double x, double t) {
    const double c = std::cos(2.0 * std::numbers::pi * (x - 0.5));
    const double u = manufactured(x, t);
    return u + 4.0 * std::numbers::pi * std::numbers::pi * std::exp(t) * c + u * u;
}

// |weak residual| of the exact solution sampled on a uniform grid with dt = h^2
double manufactured_weak_residual(std::size_t cells) {
    ParabolicProblem prob = square_problem();
    prob.source = manufactured_source;
    const HalfGrid grid = build_half_grid(prob.domain, cells, 1.0);
    const double h = 1.0 / static_cast<double>(cells);
    const double t_end = 0.25;
    const auto steps = static_cast<std::size_t>(std::llround(t_end / (h * h)));
    SpaceTimeField u;
    u.grid = grid;
    u.times = build_time_grid(t_end, steps, 1.0);
    std::vector<std::vector<double>> test(u.times.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t j = 0; j < u.times.size(); ++j) {
        std::vector<double> slice(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            slice[i] = manufactured(grid.coordinate[i], u.times[j]);
            if (j > 0 && i < grid.boundary_index())
                test[j][i] = u.times[j] * std::cos(0.5 * std::numbers::pi * grid.y[i] / 0.5);
        }
        u.values.push_back(std::move(slice));
    }
    return std::abs(weak_form_residual(u, prob, test).value);
}

}  // namespace

TEST(TimeGrid, GradedNodes) {
    const auto t = build_time_grid(1.0, 4, 2.0);
    const std::vector<double> expected = {0.0, 1.0 / 16, 0.25, 9.0 / 16, 1.0};
    ASSERT_EQ(t.size(), expected.size());
    for (std::size_t j = 0; j < t.size(); ++j) EXPECT_NEAR(t[j], expected[j], 1e-15);
}

TEST(TimeGrid, ShiftedWindowKeepsLaterNodes) {
    const auto times = build_time_grid(1.0, 10, 1.0);
    const auto shifted = shifted_time_grid(times, 0.1, 2.0);
    ASSERT_EQ(shifted.size(), 4u + 9u);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(shifted[j], 0.1 + 0.1 * std::pow(j / 4.0, 2.0), 1e-15);
    for (std::size_t j = 4; j < shifted.size(); ++j) EXPECT_EQ(shifted[j], times[j - 2]);
    EXPECT_THROW(shifted_time_grid(times, 0.0, 2.0), DomainError);
    EXPECT_THROW(shifted_time_grid(times, 0.4, 2.0), DomainError);
}

TEST(Capped, InitialSliceIsCap) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 100, 2.0);
    const auto u = solve_capped(prob, grid, build_time_grid(0.5, 40, 2.0), 7.0);
    for (double v : u.values.front()) EXPECT_EQ(v, 7.0);
    for (const auto& slice : u.values) EXPECT_EQ(slice.back(), 7.0);
    EXPECT_EQ(u.cap, 7.0);
}

TEST(Capped, LargerCapDominates) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 100, 2.0);
    const auto times = build_time_grid(0.5, 40, 2.0);
    const auto lo = solve_capped(prob, grid, times, 100.0);
    const auto hi = solve_capped(prob, grid, times, 200.0);
    const auto verdict = parabolic_comparison_check(hi, lo);
    EXPECT_TRUE(verdict.pass) << verdict.report;
    EXPECT_FALSE(parabolic_comparison_check(lo, hi).pass);
}

TEST(Step, SpatiallyConstantStateSolvesScalarImplicitEquation) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 20, 1.0);
    const double u0 = 3.0, dt = 0.1;
    // u1 + dt u1^2 = u0
    const double u1 = (-1.0 + std::sqrt(1.0 + 4.0 * dt * u0)) / (2.0 * dt);
    const StepResult step = step_implicit(prob, grid, std::vector<double>(grid.size(), u0), dt, dt, u1);
    for (double v : step.values) EXPECT_NEAR(v, u1, 1e-11);
}

TEST(Step, ConstantIsFixedPointWithoutAbsorption) {
    ParabolicProblem prob = square_problem();
    prob.beta = [](double) { return 0.0; };
    const HalfGrid grid = build_half_grid(prob.domain, 20, 2.0);
    const auto u = integrate_trajectory(prob, grid, build_time_grid(1.0, 10, 1.0), std::vector<double>(grid.size(), 2.5),
                                        [](double) { return 2.5; });
    for (const auto& slice : u.values)
        for (double v : slice) EXPECT_NEAR(v, 2.5, 1e-13);
}

TEST(Step, InvalidInputsRejected) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 20, 1.0);
    const std::vector<double> state(grid.size(), 1.0);
    EXPECT_THROW(step_implicit(prob, grid, state, 0.1, 0.0, 1.0), DomainError);
    EXPECT_THROW(step_implicit(prob, grid, std::vector<double>(3, 1.0), 0.1, 0.1, 1.0), DomainError);
    EXPECT_THROW(solve_capped(prob, grid, {0.0}, 1.0), ConfigError);
    EXPECT_THROW(solve_capped(prob, grid, {0.0, 0.2, 0.1}, 1.0), ConfigError);
}

TEST(Minimal, LadderConvergesAndIsMonotone) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 200, 3.0);
    // a mesh this coarse only stabilizes the interior to about 1e-4
    CapLadder ladder_opts;
    ladder_opts.rel_tol = 1e-4;
    const auto ladder = minimal_solution(prob, grid, build_time_grid(0.5, 100, 3.0), ladder_opts);
    EXPECT_TRUE(ladder.converged);
    EXPECT_LE(ladder.monotonicity_violation, 1e-8);
    EXPECT_LE(time_monotonicity_violation(ladder.field, interior_node_end(grid, 0.05)), 1e-8);
    const auto [lo, hi] = parabolic_residual_range(ladder.field, prob);
    EXPECT_LT(std::max(-lo, hi), 1e-8);
}

TEST(WeakForm, ZeroTestFunctionGivesZero) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 40, 2.0);
    const auto u = solve_capped(prob, grid, build_time_grid(0.5, 20, 2.0), 5.0);
    const std::vector<std::vector<double>> zero(u.times.size(), std::vector<double>(grid.size(), 0.0));
    EXPECT_EQ(weak_form_residual(u, prob, zero).value, 0.0);
}

TEST(WeakForm, ComputedSolutionHasSmallResidual) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 40, 2.0);
    const auto u = solve_capped(prob, grid, build_time_grid(0.5, 20, 2.0), 5.0);
    std::vector<std::vector<double>> test(u.times.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t j = 1; j < test.size(); ++j)
        for (std::size_t i = 0; i < grid.boundary_index(); ++i) test[j][i] = grid.distance[i] * u.times[j];
    const auto w = weak_form_residual(u, prob, test);
    EXPECT_LT(std::abs(w.value), 1e-9 * w.scale);
}

TEST(WeakForm, TestFunctionRestrictions) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 20, 2.0);
    const auto u = solve_capped(prob, grid, build_time_grid(0.5, 10, 2.0), 5.0);
    std::vector<std::vector<double>> test(u.times.size(), std::vector<double>(grid.size(), 0.0));
    test[0][0] = 1.0;
    EXPECT_THROW(weak_form_residual(u, prob, test), DomainError);
    test[0][0] = 0.0;
    test[3][grid.boundary_index()] = 1.0;
    EXPECT_THROW(weak_form_residual(u, prob, test), DomainError);
    test[3][grid.boundary_index()] = 0.0;
    test[3][2] = -1.0;
    EXPECT_THROW(weak_form_residual(u, prob, test), DomainError);
}

TEST(WeakForm, ManufacturedSolutionSecondOrder) {
    const double r1 = manufactured_weak_residual(16);
    const double r2 = manufactured_weak_residual(32);
    const double r3 = manufactured_weak_residual(64);
    EXPECT_GT(std::log2(r1 / r2), 1.6);
    EXPECT_GT(std::log2(r2 / r3), 1.6);
}

TEST(Alignment, ShrunkFieldSharesPrefixAndLaterTimes) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 100, 3.0);
    const auto times = build_time_grid(0.5, 40, 3.0);
    const double eps = 1e-2;
    const auto full = solve_capped(prob, grid, times, 10.0);
    const auto shrunk = solve_capped(prob, grid.shrunk(eps, 3.0), shifted_time_grid(times, eps, 3.0), 10.0);
    const FieldAlignment al = align_fields(full, shrunk);
    std::size_t kept = 0;
    while (grid.distance[kept] >= 2 * eps) ++kept;
    EXPECT_EQ(al.nodes, kept);
    std::size_t later = 0;
    for (double t : times) later += t >= 2 * eps;
    EXPECT_EQ(al.times.size(), later);
    for (const auto& [a, b] : al.times) EXPECT_EQ(full.times[a], shrunk.times[b]);
}

TEST(Richardson, NestedGridsRequired) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 20, 2.0);
    const auto coarse = solve_capped(prob, grid, build_time_grid(0.5, 10, 2.0), 5.0);
    const auto fine = solve_capped(prob, grid, build_time_grid(0.5, 20, 2.0), 5.0);
    const auto extrapolated = richardson_in_time(coarse, fine);
    // boundary data are constant, so the Dirichlet column is unchanged
    for (const auto& slice : extrapolated.values) EXPECT_NEAR(slice.back(), 5.0, 1e-12);
    EXPECT_THROW(richardson_in_time(coarse, coarse), DomainError);
}

TEST(Richardson, RemovesFirstOrderTimeError) {
    // constant states: u_j solves the scalar implicit recursion; the combination is closer to 1/(t + 1/u0)
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 10, 1.0);
    const double u0 = 2.0;
    auto run = [&](std::size_t steps) {
        const auto times = build_time_grid(0.4, steps, 1.0);
        return integrate_trajectory(prob, grid, times, std::vector<double>(grid.size(), u0), [u0](double t) {
            // boundary follows the exact ODE; interior follows the implicit recursion
            return 1.0 / (t + 1.0 / u0);
        });
    };
    const auto coarse = run(20);
    const auto fine = run(40);
    const auto rich = richardson_in_time(coarse, fine);
    const double exact = 1.0 / (0.4 + 1.0 / u0);
    const double err_coarse = std::abs(coarse.values.back()[0] - exact);
    const double err_rich = std::abs(rich.values.back()[0] - exact);
    EXPECT_LT(err_rich, 0.2 * err_coarse);
}
