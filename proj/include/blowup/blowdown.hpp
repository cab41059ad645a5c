#pragma once

#include <string>
#include <vector>

#include "blowup/numerics.hpp"

namespace blowup {

/// Solution of w' = -g(w), w(0) = inf, defined through the first integral
/// G(w) = int_w^inf ds/g(s) as w(t) = G^{-1}(t). Never time-stepped.
class BlowdownCurve {
public:
    /// `index` is the regular-variation index of g, used for the tail beyond
    /// the quadrature switch point; it must exceed 1. `exact_power` marks g as
    /// exactly c*w^index so that G has a closed form from any point on.
    BlowdownCurve(numerics::ScalarFn g, double index, bool exact_power = false);

    double first_integral(double w) const;
    double operator()(double t) const;
    double rhs(double w) const { return g_(w); }
    double index() const { return index_; }

private:
    numerics::ScalarFn g_;
    double index_;
    bool exact_power_;
};

/// w(t) for w' = -g(w), w(0) = inf.
double solve_blowdown(const numerics::ScalarFn& g, double index, double t);

struct RatioEvidence {
    std::vector<double> ladder;
    std::vector<double> ratios;
    numerics::LadderLimit limit;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

/// v(t)/w(t) along a decreasing t ladder for v' = -g(v), w' = -h(w), both with
/// infinite data, and the extrapolated limit as t -> 0+.
RatioEvidence equivalence_check(const numerics::ScalarFn& g, double g_index, const numerics::ScalarFn& h,
                                double h_index, const std::vector<double>& t_ladder);

/// w/v for v' = -g(c v) h(v), w' = -g(w) h(w) with g in RV_theta, h in RV_gamma,
/// gamma + theta > 1. min/max of the ratio over the ladder are reported.
RatioEvidence two_scale_equivalence(const numerics::ScalarFn& g, double theta, const numerics::ScalarFn& h,
                                    double gamma, double c, const std::vector<double>& t_ladder);

}  // namespace blowup
