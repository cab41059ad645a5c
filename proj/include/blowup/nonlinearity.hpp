#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/numerics.hpp"

namespace blowup {

/// Absorption f >= 0 with f(0) = 0, increasing on (0, inf), regularly varying
/// at infinity with declared index rho.
class Nonlinearity {
public:
    /// f(u) = u^rho.
    static Nonlinearity power(double rho);
    /// f(u) = u^rho log(1 + u).
    static Nonlinearity power_log(double rho);
    /// Arbitrary f with derivative and declared index; primitive by quadrature
    /// unless supplied.
    static Nonlinearity custom(std::string name, numerics::ScalarFn f, numerics::ScalarFn df,
                               double declared_index,
                               std::optional<numerics::ScalarFn> primitive = std::nullopt);
    /// Parse "power(rho)" or "power_log(rho)".
    static Nonlinearity from_key(std::string_view key);

    double operator()(double u) const;
    double derivative(double u) const;
    /// f(u) and f'(u) together; u <= 0 maps to (0, f'(0+)).
    void evaluate(double u, double& value, double& slope) const;

    /// F(u) = int_0^u f.
    double primitive(double u) const;
    bool has_closed_primitive() const { return kind_ == Kind::power || closed_primitive_.has_value(); }

    double index() const { return rho_; }
    /// Exactly u^rho, so tail integrals of F-powers have closed forms.
    bool is_pure_power() const { return kind_ == Kind::power; }
    const std::string& name() const { return name_; }

private:
    enum class Kind { power, power_log, custom };
    Nonlinearity() = default;

    Kind kind_ = Kind::custom;
    std::string name_;
    double rho_ = 0.0;
    int integer_power_ = 0;  // > 0 when rho is a small integer
    numerics::ScalarFn f_;
    numerics::ScalarFn df_;
    std::optional<numerics::ScalarFn> closed_primitive_;
};

/// Index estimate of a function regularly varying at infinity (or at zero).
struct IndexEstimate {
    double value = 0.0;
    std::vector<double> rungs;
    std::vector<double> estimates;  // log(R(xi u)/R(u)) / log(xi) per rung
};

/// log(R(xi u)/R(u))/log(xi) along an increasing ladder, extrapolated to
/// u = inf quadratically in the variable 1/log(u).
IndexEstimate rv_index_at_infinity(const numerics::ScalarFn& R, double xi,
                                   const std::vector<double>& ladder);

/// Same for s -> 0+ along a decreasing ladder, extrapolated in 1/|log s|.
IndexEstimate rv_index_at_zero(const numerics::ScalarFn& R, double xi,
                               const std::vector<double>& ladder);

/// Index estimate of f itself.
IndexEstimate rv_index_estimate(const Nonlinearity& nl, double xi, const std::vector<double>& ladder);

/// Default estimation ladder: decades 1e2 .. 1e8.
std::vector<double> default_index_ladder();

/// Throws ConfigError when the estimated index differs from the declared one
/// by more than 1e-2.
void validate_declared_index(const Nonlinearity& nl);

struct ConditionReport {
    bool f1 = false;
    double measured_index = 0.0;
    bool f2 = false;
    bool c = false;
    double c_exponent = 0.0;
    bool f3 = false;
    bool convex = false;
    bool f_over_u_increasing = false;
    std::vector<double> grid;
    double tolerance = 0.0;
};

/// Default sample grid: 64 log-spaced points in [1e-3, 1e8].
std::vector<double> default_condition_grid();

inline constexpr double kMonotonicityTol = 1e-10;

/// Sample-based check of the structural hypotheses on f for exponent p.
/// `c_exponent` is the l of the scaling condition f(eps u) <= eps^l f(u);
/// defaults to the declared index.
ConditionReport check_conditions(const Nonlinearity& nl, double p,
                                 const std::vector<double>& grid = default_condition_grid(),
                                 std::optional<double> c_exponent = std::nullopt);

/// True when u^{-l} f(u) is nondecreasing on the grid.
bool scaled_increasing(const Nonlinearity& nl, double l, const std::vector<double>& grid);

}  // namespace blowup
