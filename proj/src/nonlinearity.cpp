#include "blowup/nonlinearity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

namespace {

int small_integer(double rho) {
    const double r = std::round(rho);
    return (r == rho && r >= 1.0 && r <= 8.0) ? static_cast<int>(r) : 0;
}

double ipow(double u, int k) {
    double out = u;
    for (int i = 1; i < k; ++i) out *= u;
    return out;
}

std::string format_index(double rho) {
    std::ostringstream out;
    out << rho;
    return out.str();
}

}  // namespace

Nonlinearity Nonlinearity::power(double rho) {
    if (!(rho > 0.0)) throw ConfigError("power nonlinearity needs rho > 0");
    Nonlinearity nl;
    nl.kind_ = Kind::power;
    nl.name_ = "power(" + format_index(rho) + ")";
    nl.rho_ = rho;
    nl.integer_power_ = small_integer(rho);
    return nl;
}

Nonlinearity Nonlinearity::power_log(double rho) {
    if (!(rho > 0.0)) throw ConfigError("power_log nonlinearity needs rho > 0");
    Nonlinearity nl;
    nl.kind_ = Kind::power_log;
    nl.name_ = "power_log(" + format_index(rho) + ")";
    nl.rho_ = rho;
    nl.integer_power_ = small_integer(rho);
    return nl;
}

Nonlinearity Nonlinearity::custom(std::string name, numerics::ScalarFn f, numerics::ScalarFn df,
                                  double declared_index, std::optional<numerics::ScalarFn> primitive) {
    Nonlinearity nl;
    nl.kind_ = Kind::custom;
    nl.name_ = std::move(name);
    nl.rho_ = declared_index;
    nl.f_ = std::move(f);
    nl.df_ = std::move(df);
    nl.closed_primitive_ = std::move(primitive);
    return nl;
}

Nonlinearity Nonlinearity::from_key(std::string_view key) {
    const auto open = key.find('(');
    const auto close = key.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        throw ConfigError("unknown nonlinearity key '" + std::string(key) + "'");
    const std::string_view head = key.substr(0, open);
    std::string arg(key.substr(open + 1, close - open - 1));
    double rho = 0.0;
    try {
        std::size_t used = 0;
        rho = std::stod(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
        throw ConfigError("malformed index in nonlinearity key '" + std::string(key) + "'");
    }
    if (head == "power") return power(rho);
    if (head == "power_log") return power_log(rho);
    throw ConfigError("unknown nonlinearity key '" + std::string(key) + "'");
}

void Nonlinearity::evaluate(double u, double& value, double& slope) const {
    if (kind_ == Kind::custom) {
        value = u > 0.0 ? f_(u) : 0.0;
        slope = df_(std::max(u, 0.0));
        return;
    }
    if (u <= 0.0) {
        value = 0.0;
        slope = (kind_ == Kind::power && rho_ == 1.0) ? 1.0 : 0.0;
        return;
    }
    double up = 0.0;     // u^rho
    double upm1 = 0.0;   // u^{rho-1}
    if (integer_power_ > 0) {
        upm1 = integer_power_ == 1 ? 1.0 : ipow(u, integer_power_ - 1);
        up = upm1 * u;
    } else {
        up = std::pow(u, rho_);
        upm1 = up / u;
    }
    if (kind_ == Kind::power) {
        value = up;
        slope = rho_ * upm1;
    } else {
        const double lg = std::log1p(u);
        value = up * lg;
        slope = rho_ * upm1 * lg + up / (1.0 + u);
    }
}

double Nonlinearity::operator()(double u) const {
    double v = 0.0;
    double s = 0.0;
    evaluate(u, v, s);
    return v;
}

double Nonlinearity::derivative(double u) const {
    double v = 0.0;
    double s = 0.0;
    evaluate(u, v, s);
    return s;
}

double Nonlinearity::primitive(double u) const {
    if (!(u >= 0.0)) throw DomainError("primitive F(u) needs u >= 0");
    if (u == 0.0) return 0.0;
    if (kind_ == Kind::power) return std::pow(u, rho_ + 1.0) / (rho_ + 1.0);
    if (closed_primitive_) return (*closed_primitive_)(u);
    auto f = [this](double s) { return (*this)(s); };
    // tanh-sinh near 0: f may vanish like a non-integer power there
    if (u <= 1.0) return numerics::integrate_from_zero(f, u);
    return numerics::integrate_from_zero(f, 1.0) + numerics::integrate_log(f, 1.0, u);
}

namespace {

IndexEstimate index_along(const numerics::ScalarFn& R, double xi, const std::vector<double>& ladder) {
    if (!(xi > 0.0) || xi == 1.0) throw DomainError("index probe factor must be positive and != 1");
    if (ladder.size() < 2) throw DomainError("index ladder needs at least two rungs");
    IndexEstimate out;
    out.rungs = ladder;
    std::vector<double> x;
    for (double u : ladder) {
        const double a = R(u);
        const double b = R(xi * u);
        const double est = std::log(b / a) / std::log(xi);
        if (!std::isfinite(est) || !(a > 0.0) || !(b > 0.0)) {
            std::ostringstream msg;
            msg << "non-finite index evaluation at u = " << u;
            throw NumericError(msg.str());
        }
        out.estimates.push_back(est);
        x.push_back(1.0 / std::abs(std::log(u)));
    }
    const std::size_t n = out.estimates.size();
    const std::size_t k = std::min<std::size_t>(3, n);
    const std::span<const double> xs(x.data() + (n - k), k);
    const std::span<const double> ys(out.estimates.data() + (n - k), k);
    // estimates identical to rounding: nothing to extrapolate
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    if (*hi - *lo <= 1e-13 * std::max(1.0, std::abs(*hi)))
        out.value = ys.back();
    else
        out.value = numerics::extrapolate_to_zero(xs, ys);
    return out;
}

}  // namespace

IndexEstimate rv_index_at_infinity(const numerics::ScalarFn& R, double xi, const std::vector<double>& ladder) {
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (!(ladder[i] > ladder[i - 1])) throw DomainError("index ladder must be increasing");
    if (!(ladder.front() > 1.0)) throw DomainError("index ladder at infinity must start above 1");
    return index_along(R, xi, ladder);
}

IndexEstimate rv_index_at_zero(const numerics::ScalarFn& R, double xi, const std::vector<double>& ladder) {
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (!(ladder[i] < ladder[i - 1])) throw DomainError("index ladder at zero must be decreasing");
    if (!(ladder.front() < 1.0) || !(ladder.back() > 0.0))
        throw DomainError("index ladder at zero must lie in (0, 1)");
    return index_along(R, xi, ladder);
}

IndexEstimate rv_index_estimate(const Nonlinearity& nl, double xi, const std::vector<double>& ladder) {
    return rv_index_at_infinity([&nl](double u) { return nl(u); }, xi, ladder);
}

std::vector<double> default_index_ladder() { return numerics::log_grid(1e2, 1e8, 7); }

void validate_declared_index(const Nonlinearity& nl) {
    const double est = rv_index_estimate(nl, 2.0, default_index_ladder()).value;
    if (std::abs(est - nl.index()) > 1e-2) {
        std::ostringstream msg;
        msg << "declared index " << nl.index() << " of " << nl.name() << " does not match measured index "
            << est;
        throw ConfigError(msg.str());
    }
}

std::vector<double> default_condition_grid() { return numerics::log_grid(1e-3, 1e8, 64); }

bool scaled_increasing(const Nonlinearity& nl, double l, const std::vector<double>& grid) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = nl(grid[i]) / std::pow(grid[i], l);
        const double b = nl(grid[i + 1]) / std::pow(grid[i + 1], l);
        if (b - a < -kMonotonicityTol * std::max(std::abs(a), std::abs(b))) return false;
    }
    return true;
}

ConditionReport check_conditions(const Nonlinearity& nl, double p, const std::vector<double>& grid,
                                 std::optional<double> c_exponent) {
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    if (grid.size() < 3) throw DomainError("condition grid needs at least three samples");
    ConditionReport rep;
    rep.grid = grid;
    rep.tolerance = kMonotonicityTol;

    rep.measured_index = rv_index_estimate(nl, 2.0, default_index_ladder()).value;
    rep.f1 = rep.measured_index > p - 1.0;

    rep.f2 = scaled_increasing(nl, p - 1.0, grid);
    rep.f_over_u_increasing = scaled_increasing(nl, 1.0, grid);

    rep.c_exponent = c_exponent.value_or(nl.index());
    rep.c = rep.c_exponent > std::max(1.0, p - 1.0);
    for (double eps : {0.5, 0.25, 0.1, 1e-2, 1e-3}) {
        const double scale = std::pow(eps, rep.c_exponent);
        for (double u : grid) {
            const double lhs = nl(eps * u);
            const double rhs = scale * nl(u);
            if (lhs > rhs * (1.0 + kMonotonicityTol)) rep.c = false;
        }
    }

    // F3: increments of int_1^U F^{-1/p} over successive decades must shrink
    // geometrically, which makes the partial integrals Cauchy.
    const double top = std::max(grid.back(), 1e3);
    const auto decades = numerics::log_grid(1.0, top, static_cast<std::size_t>(std::round(std::log10(top))) + 1);
    auto integrand = [&nl, p](double s) { return std::pow(nl.primitive(s), -1.0 / p); };
    std::vector<double> increments;
    for (std::size_t i = 0; i + 1 < decades.size(); ++i)
        increments.push_back(numerics::integrate_log(integrand, decades[i], decades[i + 1], 1e-10));
    rep.f3 = increments.size() >= 3;
    for (std::size_t i = increments.size() >= 4 ? increments.size() - 4 : 0; i + 1 < increments.size(); ++i)
        if (!(increments[i + 1] < (1.0 - 1e-3) * increments[i])) rep.f3 = false;

    rep.convex = true;
    double prev_slope = -INFINITY;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double slope = (nl(grid[i + 1]) - nl(grid[i])) / (grid[i + 1] - grid[i]);
        if (slope < prev_slope - kMonotonicityTol * std::max(std::abs(slope), std::abs(prev_slope)))
            rep.convex = false;
        prev_slope = slope;
    }
    return rep;
}

}  // namespace blowup
