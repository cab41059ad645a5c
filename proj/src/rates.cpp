#include "blowup/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowup/blowdown.hpp"
#include "blowup/error.hpp"
#include "blowup/karamata.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

RateReport ladder_report(std::string quantity, double predicted, std::vector<double> ladder_x,
                         std::vector<double> ratios, double tolerance, double plateau_tol) {
    RateReport r;
    r.quantity = std::move(quantity);
    r.predicted = predicted;
    r.tolerance = tolerance;
    const auto limit = numerics::extrapolate_ladder(ratios, plateau_tol);
    r.ladder_x = std::move(ladder_x);
    r.ratios = std::move(ratios);
    r.extrapolated = limit.value;
    r.method = limit.method;
    r.converged = limit.converged;
    r.relative_error = std::abs(r.extrapolated - predicted) / std::abs(predicted);
    r.pass = r.converged && r.relative_error <= tolerance;
    if (!r.converged) r.note = "ladder did not converge monotonically";
    return r;
}

namespace {

std::vector<double> decreasing_ladder(double start, double ratio, double stop) {
    if (!(ratio > 1.0)) throw ConfigError("rate ladder ratio must exceed 1");
    std::vector<double> out;
    for (double x = start; x >= stop * (1.0 - 1e-12); x /= ratio) out.push_back(x);
    return out;
}

RateReport boundary_profile(std::string quantity, const HalfGrid& grid, const std::vector<double>& values,
                            const Nonlinearity& f, const WeightKernel& kernel, double p, double beta,
                            std::size_t interior_end, const RateOptions& opts) {
    const PhiFunction phi(f, p);
    // node data ordered by increasing distance
    std::vector<double> d;
    std::vector<double> ratio;
    for (std::size_t i = interior_end; i-- > 0;) {
        d.push_back(grid.distance[i]);
        ratio.push_back(values[i] / phi(capital_K(kernel, grid.distance[i])));
    }
    const double half = grid.distance.front();
    const double d_min = std::max(d.front(), opts.stop);
    const auto ladder = decreasing_ladder(opts.start * half, opts.ratio, d_min);
    if (ladder.size() < 3) {
        std::ostringstream msg;
        msg << "only " << ladder.size() << " resolved near-boundary ladder points (smallest trusted distance "
            << d.front() << "); increase mesh grading or cell count";
        throw DomainError(msg.str());
    }
    std::vector<double> rs;
    for (double x : ladder) rs.push_back(numerics::interpolate_log(d, ratio, x));
    const double predicted = boundary_rate_constant(f.index(), p, kernel.ell(), beta);
    return ladder_report(std::move(quantity), predicted, ladder, std::move(rs), opts.tolerance, opts.plateau_tol);
}

double kernel_weight(const WeightKernel& kernel, double p, double d) { return std::pow(kernel(d), p); }

}  // namespace

RateReport boundary_rate(const GridFunction& z, const EllipticProblem& prob, const RateOptions& opts) {
    return boundary_profile("elliptic_boundary_rate", z.grid, z.values, prob.f, prob.kernel, prob.p, prob.beta,
                            resolved_node_end(z.grid, opts.resolution), opts);
}

RateReport boundary_rate(const SpaceTimeField& u, double t0, const ParabolicProblem& prob, const RateOptions& opts) {
    const std::size_t j = u.nearest_time(t0);
    if (j == 0) throw DomainError("boundary rate needs t0 inside the solved window");
    std::ostringstream name;
    name << "boundary_rate_t" << u.times[j];
    RateReport r = boundary_profile(name.str(), u.grid, u.values[j], prob.f, prob.kernel, prob.p,
                                    prob.beta_at(u.times[j]), resolved_node_end(u.grid, opts.resolution), opts);
    std::ostringstream note;
    note << "slice t = " << u.times[j];
    if (!r.note.empty()) note << "; " << r.note;
    r.note = note.str();
    return r;
}

bool initial_rate_lower_bound_applies(const ParabolicProblem& prob) {
    const double n = prob.domain.is_interval() ? 1.0 : static_cast<double>(prob.domain.dimension());
    return prob.p > 2.0 * n / (n + 2.0) && scaled_increasing(prob.f, 1.0, default_condition_grid());
}

double initial_rate_profile(const ParabolicProblem& prob, double x0, double t) {
    const double b0 = prob.beta_at(0.0) * kernel_weight(prob.kernel, prob.p, prob.domain.distance_to_boundary(x0));
    const Nonlinearity& f = prob.f;
    return BlowdownCurve([&f, b0](double s) { return b0 * f(s); }, f.index(), f.is_pure_power())(t);
}

RateReport initial_rate(const SpaceTimeField& u, double x0, const ParabolicProblem& prob, const RateOptions& opts) {
    const double d0 = prob.domain.distance_to_boundary(x0);
    const double half = prob.domain.half_width();
    if (d0 < 0.25 * half) {
        std::ostringstream msg;
        msg << "x0 = " << x0 << " lies within " << d0 << " of the boundary; the boundary layer contaminates the "
            << "initial layer (need d(x0) >= " << 0.25 * half << ")";
        throw DomainError(msg.str());
    }
    const std::size_t i0 = u.nearest_node(x0);
    const double t_min = std::max(opts.stop, u.times[1]);
    const auto ladder = decreasing_ladder(opts.start, opts.ratio, t_min);
    if (ladder.size() < 3) throw DomainError("time grid does not resolve three initial-rate ladder points");
    std::vector<double> ts;
    std::vector<double> rs;
    const double x_node = u.grid.coordinate[i0];
    for (std::size_t j = 1; j < u.times.size(); ++j) {
        if (u.times[j] < 0.5 * t_min || u.times[j] > 2.0 * opts.start) continue;
        ts.push_back(u.times[j]);
        rs.push_back(u.values[j][i0] / initial_rate_profile(prob, x_node, u.times[j]));
    }
    std::vector<double> ratios;
    for (double t : ladder) ratios.push_back(numerics::interpolate_log(ts, rs, t));
    RateReport r = ladder_report("initial_rate", 1.0, ladder, std::move(ratios), opts.tolerance, opts.plateau_tol);
    std::ostringstream note;
    note << "x0 = " << x_node;
    if (!initial_rate_lower_bound_applies(prob)) {
        r.asserted = false;
        r.pass = r.converged && r.extrapolated <= 1.0 + opts.tolerance;
        note << "; lower bound not asserted (needs p > 2N/(N+2) and f(s)/s increasing), upper bound only";
    }
    if (!r.note.empty()) note << "; " << r.note;
    r.note = note.str();
    return r;
}

double xi_curve(const ParabolicProblem& prob, double t) {
    const Nonlinearity& f = prob.f;
    return BlowdownCurve([&f](double s) { return f(s); }, f.index(), f.is_pure_power())(t);
}

double xi_star_curve(const ParabolicProblem& prob, double t) {
    if (prob.kernel.is_constant()) return xi_curve(prob, t);
    const PhiFunction phi(prob.f, prob.p);
    const WeightKernel& kernel = prob.kernel;
    const double q = q_index(prob.f.index(), prob.p, kernel.ell());
    const bool exact = prob.f.is_pure_power() && kernel.power_exponent().has_value();
    return BlowdownCurve([&phi, &kernel](double s) { return effective_absorption(phi, kernel, s); }, q, exact)(t);
}

std::vector<RateReport> SandwichReport::rows() const {
    auto row = [this](std::string name, double value, std::string envelope) {
        RateReport r;
        r.quantity = std::move(name);
        r.predicted = std::numeric_limits<double>::quiet_NaN();
        r.extrapolated = value;
        r.tolerance = 0.0;
        r.method = "extremum";
        r.converged = true;
        r.pass = value >= bound_lo && value <= bound_hi;
        r.note = "envelope " + envelope + " + phi(K(d))";
        return r;
    };
    return {row("sandwich_upper_sup", upper_sup, upper_envelope), row("sandwich_lower_inf", lower_inf, lower_envelope)};
}

SandwichReport sandwich_check(const SpaceTimeField& lower, const SpaceTimeField& upper, const ParabolicProblem& prob,
                              double t_star, double resolution) {
    SandwichReport rep;
    const bool non_increasing = prob.kernel.non_increasing();
    // upper bound: xi for non-increasing k, xi* otherwise; lower bound the other way round
    rep.upper_envelope = non_increasing ? "xi" : "xi*";
    rep.lower_envelope = non_increasing ? "xi*" : "xi";
    if (prob.kernel.is_constant()) rep.upper_envelope = rep.lower_envelope = "xi";
    const PhiFunction phi(prob.f, prob.p);
    auto envelope_time = [&](const std::string& which, double t) {
        return which == "xi" ? xi_curve(prob, t) : xi_star_curve(prob, t);
    };
    auto scan = [&](const SpaceTimeField& u, const std::string& which, double& lo, double& hi) {
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        // a shrunken field approximates the full-problem one only away from its own boundary layer
        const double cut = 2.0 * u.shrink;
        std::size_t i_end = resolved_node_end(u.grid, resolution);
        while (i_end > 1 && u.grid.distance[i_end - 1] < cut) --i_end;
        std::vector<double> spatial(i_end);
        for (std::size_t i = 0; i < i_end; ++i) spatial[i] = phi(capital_K(prob.kernel, u.grid.distance[i]));
        for (std::size_t j = resolved_time_begin(u.times, resolution); j < u.times.size(); ++j) {
            const double t = u.times[j];
            if (t < cut) continue;
            if (t > t_star * (1.0 + 1e-12)) break;
            const double e_t = envelope_time(which, t);
            for (std::size_t i = 0; i < i_end; ++i) {
                const double ratio = u.values[j][i] / (e_t + spatial[i]);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
        }
    };
    scan(upper, rep.upper_envelope, rep.upper_inf, rep.upper_sup);
    scan(lower, rep.lower_envelope, rep.lower_inf, rep.lower_sup);
    rep.pass = rep.upper_sup <= rep.bound_hi && rep.upper_sup >= rep.bound_lo && rep.lower_inf >= rep.bound_lo &&
               rep.lower_inf <= rep.bound_hi;
    return rep;
}

GapReport uniqueness_gap(const SpaceTimeField& lower, const SpaceTimeField& upper, const ParabolicProblem& prob,
                         double d_frac, double t_frac) {
    GapReport rep;
    const bool convex = check_conditions(prob.f, prob.p).convex;
    rep.asserted = prob.p == 2.0 && prob.kernel.is_constant() && convex;
    if (!rep.asserted) rep.note = "uniqueness not asserted by the theorem (needs p = 2, k = 1 and convex f)";
    const double d_min = d_frac * prob.domain.half_width();
    const double t_min = t_frac * prob.t_star;
    const FieldAlignment al = align_fields(lower, upper);
    for (const auto& [jl, ju] : al.times) {
        if (lower.times[jl] < t_min) continue;
        const auto& lo = lower.values[jl];
        const auto& up = upper.values[ju];
        for (std::size_t i = 0; i < al.nodes; ++i) {
            if (lower.grid.distance[i] < d_min) continue;
            const double gap = (up[i] - lo[i]) / lo[i];
            if (gap > rep.value) {
                rep.value = gap;
                rep.worst_node = i;
                rep.worst_time = jl;
            }
        }
    }
    return rep;
}

}  // namespace blowup
