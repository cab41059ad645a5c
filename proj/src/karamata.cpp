#include "blowup/karamata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

WeightKernel WeightKernel::constant(double mu) {
    if (!(mu > 0.0)) throw ConfigError("kernel support mu must be positive");
    WeightKernel k;
    k.name_ = "const";
    k.monotonicity_ = Monotonicity::constant;
    k.ell_ = 1.0;
    k.mu_ = mu;
    k.gamma_ = 0.0;
    return k;
}

WeightKernel WeightKernel::power(double gamma, double mu) {
    if (!(gamma > -1.0)) throw ConfigError("power kernel needs gamma > -1 so that k is integrable at 0");
    if (gamma == 0.0) return constant(mu);
    if (!(mu > 0.0)) throw ConfigError("kernel support mu must be positive");
    WeightKernel k;
    std::ostringstream name;
    name << "power(" << gamma << ")";
    k.name_ = name.str();
    k.monotonicity_ = gamma > 0.0 ? Monotonicity::non_decreasing : Monotonicity::non_increasing;
    k.ell_ = 1.0 / (gamma + 1.0);
    k.mu_ = mu;
    k.gamma_ = gamma;
    return k;
}

WeightKernel WeightKernel::custom(std::string name, numerics::ScalarFn fn, Monotonicity monotonicity,
                                  double ell, double mu) {
    if (!(ell > 0.0)) throw ConfigError("kernel limit ell must be positive");
    if (monotonicity == Monotonicity::non_decreasing && ell > 1.0)
        throw ConfigError("non-decreasing kernels have ell <= 1");
    if (monotonicity == Monotonicity::non_increasing && ell < 1.0)
        throw ConfigError("non-increasing kernels have ell >= 1");
    WeightKernel k;
    k.name_ = std::move(name);
    k.monotonicity_ = monotonicity;
    k.ell_ = ell;
    k.mu_ = mu;
    k.k_ = std::move(fn);
    return k;
}

WeightKernel WeightKernel::from_key(std::string_view key, double mu) {
    if (key == "const") return constant(mu);
    const auto open = key.find('(');
    const auto close = key.rfind(')');
    if (key.substr(0, open) == "power" && open != std::string_view::npos && close != std::string_view::npos &&
        close > open) {
        std::string arg(key.substr(open + 1, close - open - 1));
        try {
            std::size_t used = 0;
            const double gamma = std::stod(arg, &used);
            if (used == arg.size()) return power(gamma, mu);
        } catch (const std::exception&) {
        }
        throw ConfigError("malformed exponent in kernel key '" + std::string(key) + "'");
    }
    throw ConfigError("unknown kernel key '" + std::string(key) + "'");
}

double WeightKernel::operator()(double s) const {
    if (k_) return k_(s);
    if (!gamma_ || *gamma_ == 0.0) return 1.0;
    return std::pow(s, *gamma_);
}

double WeightKernel::primitive(double s) const {
    if (k_) return numerics::integrate_from_zero(k_, s);
    const double g = gamma_.value_or(0.0);
    return std::pow(s, g + 1.0) / (g + 1.0);
}

double WeightKernel::primitive_inverse(double y) const {
    if (!(y > 0.0)) throw DomainError("K^{-1} needs a positive argument");
    if (k_) {
        if (y >= primitive(mu_)) throw DomainError("argument beyond K(mu) in K^{-1}");
        return numerics::solve_monotone([this](double s) { return primitive(s); }, y, 0.5 * mu_);
    }
    const double g = gamma_.value_or(0.0);
    const double s = std::pow((g + 1.0) * y, 1.0 / (g + 1.0));
    if (s >= mu_) {
        std::ostringstream msg;
        msg << "K^{-1}(" << y << ") = " << s << " lies beyond the kernel support mu = " << mu_;
        throw DomainError(msg.str());
    }
    return s;
}

double capital_K(const WeightKernel& kernel, double s) {
    if (!(s > 0.0) || !(s < kernel.mu())) {
        std::ostringstream msg;
        msg << "K(s) needs s in (0, " << kernel.mu() << "), got " << s;
        throw DomainError(msg.str());
    }
    return kernel.primitive(s);
}

EllLimit ell_limit(const WeightKernel& kernel) {
    EllLimit out;
    out.ladder = numerics::geometric_ladder(0.01 * kernel.mu(), 0.5, 12);
    const double delta = 1e-4;
    auto q = [&kernel](double s) { return kernel.primitive(s) / kernel(s); };
    for (double s : out.ladder)
        out.iterates.push_back((q(s * (1.0 + delta)) - q(s * (1.0 - delta))) / (2.0 * s * delta));
    out.limit = numerics::extrapolate_ladder(out.iterates, 1e-6);
    if (!out.limit.converged) throw NumericError("(K/k)' does not converge as s -> 0+");
    out.value = out.limit.value;
    if (std::abs(out.value - kernel.ell()) > 1e-3) {
        std::ostringstream msg;
        msg << "kernel " << kernel.name() << ": measured ell " << out.value << " differs from declared "
            << kernel.ell();
        throw ConfigError(msg.str());
    }
    return out;
}

double r_index(double rho, double p) {
    if (!(rho + 1.0 - p > 0.0)) throw ConfigError("r = (rho+1)/(rho+1-p) needs rho > p - 1");
    return (rho + 1.0) / (rho + 1.0 - p);
}

double index_gate(double p, double ell) { return std::max({1.0, p - 1.0, p - 1.0 - (p - 2.0) / ell}); }

double q_index(double rho, double p, double ell) {
    const double gate = index_gate(p, ell);
    if (!(rho > gate)) {
        std::ostringstream msg;
        msg << "rho = " << rho << " violates rho > max{1, p-1, p-1-(p-2)/ell} = " << gate;
        throw ConfigError(msg.str());
    }
    const double q = rho - (rho - p + 1.0) * (1.0 - ell);
    if (!(q > std::max(1.0, p - 1.0))) throw NumericError("q index fails q > max{1, p-1}");
    return q;
}

double boundary_rate_constant(double rho, double p, double ell, double beta) {
    const double r = r_index(rho, p);
    return std::pow((r + ell - 1.0) / (r * beta), (r - 1.0) / p);
}

PhiFunction::PhiFunction(Nonlinearity nl, double p)
    : nl_(std::move(nl)), p_(p), conjugate_(p / (p - 1.0)), decay_((nl_.index() + 1.0) / p) {
    if (!(p > 1.0)) throw ConfigError("phi needs p > 1");
    if (!(decay_ > 1.0))
        throw ConfigError("int^inf F^{-1/p} diverges (condition F3 fails): need (rho+1)/p > 1");
}

double PhiFunction::integrand(double s) const { return std::pow(conjugate_ * nl_.primitive(s), -1.0 / p_); }

double PhiFunction::tail(double y) const {
    if (!(y > 0.0)) throw DomainError("phi^{-1} needs a positive argument");
    // exact power F: the power-law tail is exact from y onward
    if (nl_.is_pure_power()) return integrand(y) * y / (decay_ - 1.0);
    // F(s) accumulated from F(y): avoids one quadrature for F per integrand point
    return numerics::cumulative_tail_integral(
        [this](double s) { return nl_(s); }, nl_.primitive(y),
        [this](double, double F) { return std::pow(conjugate_ * F, -1.0 / p_); }, y, decay_);
}

double PhiFunction::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("phi(t) needs t > 0");
    double guess = 1.0;
    if (nl_.is_pure_power()) {
        // T(y) = T(1) y^{1-decay}
        guess = std::pow(t / tail(1.0), 1.0 / (1.0 - decay_));
    }
    return numerics::solve_monotone([this](double y) { return tail(y); }, t, guess);
}

double PhiFunction::inverse(double s) const {
    if (!(s > 0.0)) throw DomainError("phi^{-1}(s) needs s > 0");
    return tail(s);
}

double PhiFunction::slope_magnitude(double t) const {
    return std::pow(conjugate_ * nl_.primitive((*this)(t)), 1.0 / p_);
}

double phi(const Nonlinearity& nl, double p, double t) { return PhiFunction(nl, p)(t); }

double phi_inverse(const Nonlinearity& nl, double p, double s) { return PhiFunction(nl, p).inverse(s); }

double effective_absorption(const PhiFunction& ph, const WeightKernel& kernel, double s) {
    const double y = ph.inverse(s);
    const double d = kernel.primitive_inverse(y);
    return std::pow(kernel(d), ph.p()) * ph.nonlinearity()(s);
}

double effective_absorption(const Nonlinearity& nl, const WeightKernel& kernel, double p, double s) {
    return effective_absorption(PhiFunction(nl, p), kernel, s);
}

Lemma41Evidence lemma41_ratio(const WeightKernel& kernel, const Nonlinearity& nl, double p, double sigma,
                              const std::vector<double>& s_ladder) {
    const double rho = nl.index();
    const double ell = kernel.ell();
    const double r = r_index(rho, p);
    Lemma41Evidence ev;
    ev.window_lo = p * (1.0 - ell) / (r - 1.0);
    ev.window_hi = rho - 1.0;
    constexpr double margin = 1e-9;
    if (!(sigma > ev.window_lo + margin && sigma < ev.window_hi - margin)) {
        std::ostringstream msg;
        msg << "sigma = " << sigma << " outside the admissible window (" << ev.window_lo << ", " << ev.window_hi
            << ")";
        throw ConfigError(msg.str());
    }
    for (std::size_t i = 1; i < s_ladder.size(); ++i)
        if (!(s_ladder[i] < s_ladder[i - 1])) throw DomainError("Lemma 4.1 ladder must decrease toward 0");
    const PhiFunction ph(nl, p);
    ev.ladder = s_ladder;
    for (double s : s_ladder)
        ev.ratios.push_back(std::pow(ph(capital_K(kernel, s)), -sigma) / std::pow(kernel(s), p));
    ev.decreasing = ev.ratios.size() >= 2;
    ev.min_decay_per_decade = INFINITY;
    for (std::size_t i = 0; i + 1 < ev.ratios.size(); ++i) {
        if (!(ev.ratios[i + 1] < ev.ratios[i])) ev.decreasing = false;
        const double decades = std::log10(s_ladder[i] / s_ladder[i + 1]);
        const double decay = std::pow(ev.ratios[i] / ev.ratios[i + 1], 1.0 / decades);
        ev.min_decay_per_decade = std::min(ev.min_decay_per_decade, decay);
    }
    return ev;
}

}  // namespace blowup
