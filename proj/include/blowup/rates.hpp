#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blowup/elliptic.hpp"
#include "blowup/parabolic.hpp"

namespace blowup {

/// Relative pass tolerance for constants measured on PDE fields.
inline constexpr double kPdeTolerance = 0.05;
/// Relative pass tolerance for ODE/quadrature-measured constants.
inline constexpr double kOdeTolerance = 1e-3;

/// Measured vs. predicted asymptotic constant with extrapolation evidence.
struct RateReport {
    std::string quantity;
    double predicted = 0.0;
    std::vector<double> ladder_x;  // d or t values, ordered toward the limit
    std::vector<double> ratios;
    double extrapolated = 0.0;
    double relative_error = 0.0;
    double tolerance = 0.0;
    std::string method;
    bool converged = false;
    /// False when the theorem's hypotheses fail and the report is informative only.
    bool asserted = true;
    bool pass = false;
    std::string note;
};

struct RateOptions {
    /// First ladder point as a fraction of the half width (boundary rate) or
    /// absolute first time (initial rate).
    double start = 0.1;
    /// Smallest ladder point; the resolved-node limit may raise it.
    double stop = 0.0;
    double ratio = 2.0;
    /// Boundary ladders stop where the local spacing exceeds resolution * d.
    double resolution = 0.02;
    double tolerance = kPdeTolerance;
    /// Relative change below which the last iterates count as a plateau.
    double plateau_tol = 1e-3;
};

/// z(x)/phi(K(d(x))) along d_k = start*H/ratio^k, extrapolated as d -> 0 and
/// compared with ((r + ell - 1)/(r beta))^{(r-1)/p}.
RateReport boundary_rate(const GridFunction& z, const EllipticProblem& prob, const RateOptions& opts = {});

/// Same for the slice of a trajectory nearest to t0 (beta evaluated at t0).
RateReport boundary_rate(const SpaceTimeField& u, double t0, const ParabolicProblem& prob,
                         const RateOptions& opts = {});

/// True when p > 2N/(N+2) (N = 1 for intervals) and f(s)/s is increasing.
bool initial_rate_lower_bound_applies(const ParabolicProblem& prob);

/// u(x0, t)/tau(t) along t_k = start/ratio^k >= stop, with tau' = -b(x0,0) f(tau).
/// Two-sided limit 1 is asserted when initial_rate_lower_bound_applies,
/// otherwise only the upper bound. DomainError when x0 lies within a quarter
/// half-width of the boundary.
RateReport initial_rate(const SpaceTimeField& u, double x0, const ParabolicProblem& prob,
                        const RateOptions& opts = {.start = 0.1, .stop = 1e-3});

/// tau(t) of the initial-rate statement at x0.
double initial_rate_profile(const ParabolicProblem& prob, double x0, double t);

/// Envelope ratios of the two-sided bound C[xi# + phi(K(d))] / c[xi# + phi(K(d))].
struct SandwichReport {
    /// sup of upper/E_upper and inf of lower/E_lower over the checked grid.
    double upper_sup = 0.0;
    double lower_inf = 0.0;
    /// Companion extremes (inf of upper/E_upper, sup of lower/E_lower).
    double upper_inf = 0.0;
    double lower_sup = 0.0;
    std::string upper_envelope;  // "xi" or "xi*"
    std::string lower_envelope;
    double bound_lo = 1e-3;
    double bound_hi = 1e3;
    bool pass = false;

    std::vector<RateReport> rows() const;
};

/// xi(t) for xi' = -f(xi) and xi*(t) for xi*' = -f*(xi*).
double xi_curve(const ParabolicProblem& prob, double t);
double xi_star_curve(const ParabolicProblem& prob, double t);

/// Both envelope ratios over the resolved part of each field: nodes with
/// spacing <= resolution * d and steps with dt <= resolution * t, up to t_star.
/// A shrunken field (shrink = eps) is scanned only where d >= 2 eps, t >= 2 eps.
SandwichReport sandwich_check(const SpaceTimeField& lower, const SpaceTimeField& upper, const ParabolicProblem& prob,
                              double t_star, double resolution = 0.1);

struct GapReport {
    double value = 0.0;
    std::size_t worst_node = 0;
    std::size_t worst_time = 0;
    bool asserted = false;
    std::string note;
};

/// max (upper - lower)/lower over shared nodes with d >= d_frac*H and times
/// t >= t_frac*t_star. `asserted` reflects whether p = 2, k = 1 and f convex.
GapReport uniqueness_gap(const SpaceTimeField& lower, const SpaceTimeField& upper, const ParabolicProblem& prob,
                         double d_frac = 0.1, double t_frac = 0.1);

/// Builds a report from a ladder of ratios ordered toward the limit.
RateReport ladder_report(std::string quantity, double predicted, std::vector<double> ladder_x,
                         std::vector<double> ratios, double tolerance, double plateau_tol);

}  // namespace blowup
