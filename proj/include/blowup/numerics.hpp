#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

// Quadrature, root finding and limit extrapolation shared by the
// regular-variation, blow-down and rate modules.
namespace blowup::numerics {

using ScalarFn = std::function<double(double)>;

inline constexpr double kQuadratureTol = 1e-13;

/// Adaptive Gauss-Kronrod on a finite interval.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = kQuadratureTol);

/// Integral over [a, b], 0 < a < b, in the variable log s. Suitable for
/// integrands spanning many decades.
double integrate_log(const ScalarFn& f, double a, double b, double rel_tol = kQuadratureTol);

/// Integral over (0, b] of a function with an integrable singularity at 0.
double integrate_from_zero(const ScalarFn& f, double b, double rel_tol = kQuadratureTol);

/// Integral of f over [y, infinity) for an integrand decaying like s^{-decay}
/// with decay > 1. Quadrature up to a switch point U*, power-law tail matched
/// at U* beyond it.
double tail_integral(const ScalarFn& f, double y, double decay);

/// Integral of h(s, F(s)) over [y, infinity), where F(s) = F_y + int_y^s f,
/// for an integrand decaying like s^{-decay} (decay > 1). F is accumulated
/// panel by panel with fixed Gauss-Legendre rules in log s, so each call costs
/// a few ten thousand evaluations of f and h regardless of how F is defined.
double cumulative_tail_integral(const ScalarFn& f, double F_y, const std::function<double(double, double)>& h,
                                double y, double decay);

/// Switch point used by tail_integral.
double tail_switch_point(double y, double decay);

/// Solve g(x) = target for a strictly monotone g on (0, inf) by geometric
/// bracketing from `guess` followed by TOMS 748.
double solve_monotone(const ScalarFn& g, double target, double guess);

/// Limit estimate from a ladder of iterates ordered toward the limit.
struct LadderLimit {
    double value = 0.0;
    std::string method;  // "aitken", "plateau", "last"
    bool converged = false;
    std::array<double, 3> last_iterates{};
};

/// Aitken delta-squared on the last three iterates when their successive
/// differences shrink monotonically; "plateau" when both differences are
/// below plateau_tol relative; otherwise the last iterate, non-converged.
LadderLimit extrapolate_ladder(std::span<const double> iterates, double plateau_tol);

/// Polynomial (Neville) extrapolation of y(x) to x = 0 through all points.
double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys);

/// Richardson combination of two approximations with step ratio `ratio` and
/// error order `order`: (ratio^order * fine - coarse) / (ratio^order - 1).
double richardson(double coarse, double fine, double ratio, double order);

/// start * ratio^k, k = 0..count-1.
std::vector<double> geometric_ladder(double start, double ratio, std::size_t count);

/// count log-spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Linear interpolation of (xs, ys) at x in log(x) (xs increasing, positive).
double interpolate_log(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace blowup::numerics
