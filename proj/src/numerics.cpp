#include "blowup/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "blowup/error.hpp"

namespace blowup::numerics {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

double checked(double value, const char* what) {
    if (!std::isfinite(value)) throw NumericError(std::string("non-finite value in ") + what);
    return value;
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double err = 0.0;
    return checked(Kronrod::integrate(f, a, b, 20, rel_tol, &err), "integrate");
}

double integrate_log(const ScalarFn& f, double a, double b, double rel_tol) {
    if (!(a > 0.0) || !(b >= a)) throw DomainError("integrate_log needs 0 < a <= b");
    if (a == b) return 0.0;
    const double la = std::log(a);
    const double lb = std::log(b);
    // panels of at most two decades keep every panel well resolved
    const double panel = 2.0 * std::log(10.0);
    const auto panels = static_cast<std::size_t>(std::ceil((lb - la) / panel));
    const double width = (lb - la) / static_cast<double>(std::max<std::size_t>(panels, 1));
    auto g = [&f](double v) {
        const double s = std::exp(v);
        return f(s) * s;
    };
    double sum = 0.0;
    for (std::size_t k = 0; k < std::max<std::size_t>(panels, 1); ++k) {
        const double lo = la + width * static_cast<double>(k);
        const double hi = k + 1 == panels ? lb : lo + width;
        double err = 0.0;
        sum += Kronrod::integrate(g, lo, hi, 20, rel_tol, &err);
    }
    return checked(sum, "integrate_log");
}

double integrate_from_zero(const ScalarFn& f, double b, double rel_tol) {
    if (!(b > 0.0)) throw DomainError("integrate_from_zero needs b > 0");
    boost::math::quadrature::tanh_sinh<double> ts;
    return checked(ts.integrate(f, 0.0, b, rel_tol), "integrate_from_zero");
}

double tail_switch_point(double y, double decay) {
    // tail mass beyond U* is about (y/U*)^{decay-1} of the total; aim for 1e-12
    const double decades = std::clamp(12.0 / (decay - 1.0), 2.0, 250.0);
    const double room = 300.0 - std::log10(std::max(y, 1.0));
    return y * std::pow(10.0, std::min(decades, room));
}

double tail_integral(const ScalarFn& f, double y, double decay) {
    if (!(y > 0.0)) throw DomainError("tail integral needs y > 0");
    if (!(decay > 1.0)) throw ConfigError("tail integral diverges: integrand decay exponent <= 1");
    const double u_star = tail_switch_point(y, decay);
    const double body = integrate_log(f, y, u_star);
    const double tail = f(u_star) * u_star / (decay - 1.0);
    return checked(body + tail, "tail_integral");
}

double cumulative_tail_integral(const ScalarFn& f, double F_y, const std::function<double(double, double)>& h,
                                double y, double decay) {
    if (!(y > 0.0)) throw DomainError("tail integral needs y > 0");
    if (!(decay > 1.0)) throw ConfigError("tail integral diverges: integrand decay exponent <= 1");
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // one rule = the symmetric node pairs -x_i, +x_i on [-1, 1]
    std::vector<double> nodes;
    std::vector<double> weights;
    for (std::size_t i = 0; i < x.size(); ++i) {
        nodes.push_back(-x[i]);
        weights.push_back(w[i]);
        nodes.push_back(x[i]);
        weights.push_back(w[i]);
    }
    // int_a^b f(s) ds in v = log s
    auto panel_integral = [&](double va, double vb) {
        const double mid = 0.5 * (va + vb);
        const double half = 0.5 * (vb - va);
        double sum = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double s = std::exp(mid + half * nodes[k]);
            sum += weights[k] * f(s) * s;
        }
        return sum * half;
    };
    const double u_star = tail_switch_point(y, decay);
    const double lv = std::log(y);
    const double uv = std::log(u_star);
    const double quarter_decade = 0.25 * std::log(10.0);
    const auto panels = static_cast<std::size_t>(std::ceil((uv - lv) / quarter_decade));
    const double width = (uv - lv) / static_cast<double>(std::max<std::size_t>(panels, 1));
    double F = F_y;
    double total = 0.0;
    for (std::size_t p = 0; p < std::max<std::size_t>(panels, 1); ++p) {
        const double va = lv + width * static_cast<double>(p);
        const double vb = va + width;
        const double mid = 0.5 * (va + vb);
        const double half = 0.5 * width;
        double sum = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double v = mid + half * nodes[k];
            const double s = std::exp(v);
            sum += weights[k] * h(s, F + panel_integral(va, v)) * s;
        }
        total += sum * half;
        F += panel_integral(va, vb);
    }
    total += h(u_star, F) * u_star / (decay - 1.0);
    return checked(total, "cumulative_tail_integral");
}

double solve_monotone(const ScalarFn& g, double target, double guess) {
    if (!(guess > 0.0)) guess = 1.0;
    auto h = [&](double log_x) { return g(std::exp(log_x)) - target; };
    double lo = std::log(guess);
    double hi = lo;
    double h_lo = h(lo);
    double h_hi = h_lo;
    if (h_lo == 0.0) return guess;
    // expand in log space until the sign changes
    double step = 1.0;
    for (int it = 0; it < 200; ++it) {
        lo -= step;
        hi += step;
        h_lo = h(lo);
        h_hi = h(hi);
        if (std::isfinite(h_lo) && std::isfinite(h_hi) && h_lo * h_hi <= 0.0) break;
        step *= 1.5;
        if (hi > 700.0 || lo < -700.0) {
            std::ostringstream msg;
            msg << "cannot bracket monotone root for target " << target;
            throw DomainError(msg.str());
        }
    }
    if (!(h_lo * h_hi <= 0.0)) throw DomainError("cannot bracket monotone root");
    if (h_lo == 0.0) return std::exp(lo);
    if (h_hi == 0.0) return std::exp(hi);
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(50);
    auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, h_lo, h_hi, tol, max_iter);
    return std::exp(0.5 * (a + b));
}

LadderLimit extrapolate_ladder(std::span<const double> iterates, double plateau_tol) {
    if (iterates.size() < 3) throw NumericError("ladder extrapolation needs at least three iterates");
    const std::size_t n = iterates.size();
    LadderLimit out;
    out.last_iterates = {iterates[n - 3], iterates[n - 2], iterates[n - 1]};
    const double d1 = iterates[n - 2] - iterates[n - 3];
    const double d2 = iterates[n - 1] - iterates[n - 2];
    const double scale = std::max(std::abs(iterates[n - 1]), 1e-300);
    out.value = iterates[n - 1];
    if (std::abs(d1) <= plateau_tol * scale && std::abs(d2) <= plateau_tol * scale) {
        out.method = "plateau";
        out.converged = true;
        return out;
    }
    if (std::abs(d2) < std::abs(d1) && d1 * d2 > 0.0) {
        out.method = "aitken";
        out.value = iterates[n - 1] - d2 * d2 / (d2 - d1);
        out.converged = std::isfinite(out.value);
        return out;
    }
    out.method = "last";
    out.converged = false;
    return out;
}

double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.empty()) throw NumericError("extrapolate_to_zero: size mismatch");
    std::vector<double> p(ys.begin(), ys.end());
    const std::size_t n = p.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double xi = xs[i];
            const double xj = xs[i + level];
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    return checked(p[0], "extrapolate_to_zero");
}

double richardson(double coarse, double fine, double ratio, double order) {
    const double w = std::pow(ratio, order);
    return (w * fine - coarse) / (w - 1.0);
}

std::vector<double> geometric_ladder(double start, double ratio, std::size_t count) {
    std::vector<double> out(count);
    double v = start;
    for (auto& x : out) {
        x = v;
        v *= ratio;
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = std::exp(a + (b - a) * t);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

double interpolate_log(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.size() < 2 || xs.size() != ys.size()) throw NumericError("interpolate_log: bad table");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (std::log(x) - std::log(xs[lo])) / (std::log(xs[hi]) - std::log(xs[lo]));
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

}  // namespace blowup::numerics
