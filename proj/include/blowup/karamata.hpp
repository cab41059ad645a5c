#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/nonlinearity.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

/// Positive monotone kernel k on (0, mu) in the class K_ell:
/// (K/k)'(0+) = ell with K(s) = int_0^s k.
class WeightKernel {
public:
    enum class Monotonicity { constant, non_increasing, non_decreasing };

    /// k = 1 (ell = 1).
    static WeightKernel constant(double mu);
    /// k(s) = s^gamma, gamma > -1 (ell = 1/(gamma+1)).
    static WeightKernel power(double gamma, double mu);
    /// Kernel without closed forms; K by quadrature, K^{-1} by root finding.
    static WeightKernel custom(std::string name, numerics::ScalarFn k, Monotonicity monotonicity,
                               double ell, double mu);
    /// Parse "const" or "power(gamma)".
    static WeightKernel from_key(std::string_view key, double mu);

    double operator()(double s) const;
    /// K(s) for s in (0, mu); closed form when available.
    double primitive(double s) const;
    /// Inverse of K on (0, K(mu)).
    double primitive_inverse(double y) const;

    double ell() const { return ell_; }
    double mu() const { return mu_; }
    Monotonicity monotonicity() const { return monotonicity_; }
    bool non_increasing() const { return monotonicity_ != Monotonicity::non_decreasing; }
    bool non_decreasing() const { return monotonicity_ != Monotonicity::non_increasing; }
    bool is_constant() const { return monotonicity_ == Monotonicity::constant; }
    /// gamma of a power kernel (0 for the constant kernel).
    std::optional<double> power_exponent() const { return gamma_; }
    const std::string& name() const { return name_; }

private:
    WeightKernel() = default;

    std::string name_;
    Monotonicity monotonicity_ = Monotonicity::constant;
    double ell_ = 1.0;
    double mu_ = 1.0;
    std::optional<double> gamma_;
    numerics::ScalarFn k_;
};

/// K(s); domain error outside (0, mu).
double capital_K(const WeightKernel& kernel, double s);

struct EllLimit {
    double value = 0.0;
    std::vector<double> ladder;
    std::vector<double> iterates;
    numerics::LadderLimit limit;
};

/// Extrapolated (K/k)'(0+). Throws NumericError when the ladder does not
/// converge and ConfigError when the value disagrees with the declared ell by
/// more than 1e-3.
EllLimit ell_limit(const WeightKernel& kernel);

/// r = (rho + 1)/(rho + 1 - p).
double r_index(double rho, double p);

/// Theorem-1.1 index gate: rho > max{1, p-1, p-1-(p-2)/ell}.
double index_gate(double p, double ell);

/// q = rho - (rho - p + 1)(1 - ell); ConfigError when rho fails the gate.
double q_index(double rho, double p, double ell);

/// Boundary rate constant ((r + ell - 1)/(r beta))^{(r-1)/p}.
double boundary_rate_constant(double rho, double p, double ell, double beta);

/// The profile phi defined by int_{phi(t)}^inf (p' F(s))^{-1/p} ds = t.
class PhiFunction {
public:
    /// ConfigError when the tail integral diverges ((rho + 1)/p <= 1).
    PhiFunction(Nonlinearity nl, double p);

    /// T(y) = int_y^inf (p' F)^{-1/p}; this is also phi^{-1}(y).
    double tail(double y) const;
    double operator()(double t) const;
    double inverse(double s) const;
    /// Right side of -phi'(t) = (p' F(phi(t)))^{1/p}.
    double slope_magnitude(double t) const;

    const Nonlinearity& nonlinearity() const { return nl_; }
    double p() const { return p_; }

private:
    double integrand(double s) const;

    Nonlinearity nl_;
    double p_;
    double conjugate_;
    double decay_;
};

double phi(const Nonlinearity& nl, double p, double t);
double phi_inverse(const Nonlinearity& nl, double p, double s);

/// f*(s) = (k o K^{-1} o phi^{-1}(s))^p f(s).
double effective_absorption(const PhiFunction& phi, const WeightKernel& kernel, double s);
double effective_absorption(const Nonlinearity& nl, const WeightKernel& kernel, double p, double s);

struct Lemma41Evidence {
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> ladder;
    std::vector<double> ratios;
    /// min over consecutive rungs of ratio(s_k)/ratio(s_{k+1}) normalised to
    /// one decade of s.
    double min_decay_per_decade = 0.0;
    bool decreasing = false;
};

/// phi^{-sigma}(K(s))/k^p(s) along a decreasing ladder s -> 0+. ConfigError
/// unless p(1-ell)/(r-1) < sigma < rho-1 (margin 1e-9).
Lemma41Evidence lemma41_ratio(const WeightKernel& kernel, const Nonlinearity& nl, double p, double sigma,
                              const std::vector<double>& s_ladder);

}  // namespace blowup
