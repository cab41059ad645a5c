#include <gtest/gtest.h>

#include <cmath>

#include "blowup/error.hpp"
#include "blowup/rates.hpp"

using namespace blowup;

namespace {

ParabolicProblem square_problem() {
    ParabolicProblem prob;
    prob.domain = Domain::interval(0.0, 1.0);
    prob.f = Nonlinearity::power(2.0);
    prob.kernel = WeightKernel::constant(2.0);
    return prob;
}

// c * 6/d^2 on a graded half grid (the boundary value is only a placeholder)
GridFunction scaled_profile(double c) {
    GridFunction z;
    z.grid = build_half_grid(Domain::interval(0.0, 1.0), 2000, 3.0);
    for (double d : z.grid.distance) z.values.push_back(d > 0.0 ? c * 6.0 / (d * d) : 1e300);
    return z;
}

SpaceTimeField constant_field(const HalfGrid& grid, const std::vector<double>& times, double v) {
    SpaceTimeField u;
    u.grid = grid;
    u.times = times;
    u.values.assign(times.size(), std::vector<double>(grid.size(), v));
    return u;
}

}  // namespace

TEST(LadderReport, ConstantRatiosPass) {
    const auto r = ladder_report("q", 1.0, {0.1, 0.05, 0.025, 0.0125}, {1.0, 1.0, 1.0, 1.0}, 0.05, 1e-3);
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.extrapolated, 1.0);
    EXPECT_EQ(r.relative_error, 0.0);
}

TEST(LadderReport, GeometricApproachIsExtrapolated) {
    // 1 + 0.2 * 2^-k: Aitken recovers the limit exactly
    const auto r = ladder_report("q", 1.0, {1, 2, 3, 4}, {1.2, 1.1, 1.05, 1.025}, 0.05, 1e-3);
    EXPECT_EQ(r.method, "aitken");
    EXPECT_NEAR(r.extrapolated, 1.0, 1e-12);
    EXPECT_TRUE(r.pass);
}

TEST(LadderReport, WrongLimitFails) {
    const auto r = ladder_report("q", 1.0, {1, 2, 3}, {1.1, 1.1, 1.1}, 0.05, 1e-3);
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.relative_error, 0.1, 1e-12);
}

TEST(BoundaryRate, ExactProfileRecoversConstant) {
    EllipticProblem prob;
    const auto r = boundary_rate(scaled_profile(1.0), prob);
    EXPECT_NEAR(r.predicted, 1.0, 1e-15);
    EXPECT_NEAR(r.extrapolated, 1.0, 1e-6);
    EXPECT_TRUE(r.pass);
    EXPECT_GE(r.ladder_x.size(), 3u);
    for (std::size_t k = 1; k < r.ladder_x.size(); ++k) EXPECT_LT(r.ladder_x[k], r.ladder_x[k - 1]);
}

TEST(BoundaryRate, WeightScalesPrediction) {
    EllipticProblem prob;
    prob.beta = 4.0;
    const auto r = boundary_rate(scaled_profile(0.25), prob);
    EXPECT_NEAR(r.predicted, 0.25, 1e-15);
    EXPECT_NEAR(r.extrapolated, 0.25, 1e-6);
    EXPECT_TRUE(r.pass);
    EXPECT_FALSE(boundary_rate(scaled_profile(1.0), prob).pass);
}

TEST(BoundaryRate, CoarseGridRejected) {
    EllipticProblem prob;
    GridFunction z;
    z.grid = build_half_grid(prob.domain, 8, 1.0);
    z.values.assign(z.grid.size(), 1.0);
    EXPECT_THROW(boundary_rate(z, prob), DomainError);
}

TEST(InitialRate, LowerBoundGate) {
    auto prob = square_problem();
    EXPECT_TRUE(initial_rate_lower_bound_applies(prob));
    prob.domain = Domain::ball(1.0, 3);
    prob.p = 1.1;
    prob.f = Nonlinearity::power(3.0);
    EXPECT_FALSE(initial_rate_lower_bound_applies(prob));
    prob.p = 1.3;
    EXPECT_TRUE(initial_rate_lower_bound_applies(prob));
}

TEST(InitialRate, ProfileIsBlowdownOfLocalWeight) {
    auto prob = square_problem();
    EXPECT_NEAR(initial_rate_profile(prob, 0.5, 0.1), 10.0, 1e-8);
    prob.beta = [](double) { return 2.0; };
    EXPECT_NEAR(initial_rate_profile(prob, 0.5, 0.1), 5.0, 1e-8);
    prob.beta = {};
    prob.kernel = WeightKernel::power(1.0, 2.0);
    // k(d)^2 = 1/16 at d = 1/4
    EXPECT_NEAR(initial_rate_profile(prob, 0.25, 0.1), 160.0, 1e-6);
}

TEST(InitialRate, NearBoundaryPointRejected) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 40, 1.0);
    const auto u = constant_field(grid, build_time_grid(0.5, 40, 2.0), 1.0);
    EXPECT_THROW(initial_rate(u, 0.05, prob), DomainError);
}

TEST(InitialRate, ExactBlowdownFieldPasses) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 40, 1.0);
    SpaceTimeField u = constant_field(grid, build_time_grid(0.5, 400, 3.0), 0.0);
    for (std::size_t j = 1; j < u.times.size(); ++j) u.values[j].assign(grid.size(), 1.0 / u.times[j]);
    const auto r = initial_rate(u, 0.5, prob);
    EXPECT_NEAR(r.extrapolated, 1.0, 1e-8);
    EXPECT_TRUE(r.asserted);
    EXPECT_TRUE(r.pass);
}

TEST(Envelopes, ConstantKernelUsesSameCurve) {
    const auto prob = square_problem();
    for (double t : {1e-3, 0.1, 1.0}) {
        EXPECT_NEAR(xi_curve(prob, t) * t, 1.0, 1e-8);
        EXPECT_EQ(xi_star_curve(prob, t), xi_curve(prob, t));
    }
}

TEST(Envelopes, LinearKernelEffectiveCurve) {
    // f*(s) = 2 sqrt(6) s^{3/2}: xi*(t) = (sqrt(6) t)^{-2} = 1/(6 t^2)
    auto prob = square_problem();
    prob.kernel = WeightKernel::power(1.0, 2.0);
    for (double t : {1e-3, 0.05, 0.2}) EXPECT_NEAR(xi_star_curve(prob, t) * 6.0 * t * t, 1.0, 1e-6);
}

TEST(Gap, IdenticalFieldsHaveZeroGap) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 40, 2.0);
    const auto u = constant_field(grid, build_time_grid(0.5, 20, 2.0), 3.0);
    const auto gap = uniqueness_gap(u, u, prob);
    EXPECT_EQ(gap.value, 0.0);
    EXPECT_TRUE(gap.asserted);
}

TEST(Gap, RelativeDifferenceMeasured) {
    const auto prob = square_problem();
    const HalfGrid grid = build_half_grid(prob.domain, 40, 2.0);
    const auto times = build_time_grid(0.5, 20, 2.0);
    const auto lo = constant_field(grid, times, 2.0);
    const auto hi = constant_field(grid, times, 2.1);
    EXPECT_NEAR(uniqueness_gap(lo, hi, prob).value, 0.05, 1e-12);
}

TEST(Gap, NotAssertedOutsideHypotheses) {
    auto prob = square_problem();
    prob.p = 3.0;
    prob.f = Nonlinearity::power(4.0);
    const HalfGrid grid = build_half_grid(prob.domain, 40, 2.0);
    const auto u = constant_field(grid, build_time_grid(0.5, 20, 2.0), 3.0);
    const auto gap = uniqueness_gap(u, u, prob);
    EXPECT_FALSE(gap.asserted);
    EXPECT_FALSE(gap.note.empty());
    prob = square_problem();
    prob.kernel = WeightKernel::power(1.0, 2.0);
    EXPECT_FALSE(uniqueness_gap(u, u, prob).asserted);
}

TEST(Sandwich, RowsCheckBounds) {
    SandwichReport rep;
    rep.upper_sup = 4.0;
    rep.lower_inf = 0.5;
    rep.upper_envelope = "xi";
    rep.lower_envelope = "xi";
    auto rows = rep.rows();
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].quantity, "sandwich_upper_sup");
    EXPECT_TRUE(rows[0].pass);
    EXPECT_TRUE(rows[1].pass);
    rep.bound_hi = 2.0;
    EXPECT_FALSE(rep.rows()[0].pass);
}
