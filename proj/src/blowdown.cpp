#include "blowup/blowdown.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

BlowdownCurve::BlowdownCurve(numerics::ScalarFn g, double index, bool exact_power)
    : g_(std::move(g)), index_(index), exact_power_(exact_power) {
    if (!(index_ > 1.0)) {
        std::ostringstream msg;
        msg << "int^inf ds/g(s) diverges for index " << index_ << " <= 1";
        throw ConfigError(msg.str());
    }
}

double BlowdownCurve::first_integral(double w) const {
    if (!(w > 0.0)) throw DomainError("first integral needs w > 0");
    auto inv = [this](double s) { return 1.0 / g_(s); };
    if (exact_power_) return inv(w) * w / (index_ - 1.0);
    return numerics::tail_integral(inv, w, index_);
}

double BlowdownCurve::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("blow-down curve needs t > 0");
    if (exact_power_) {
        // G(w) = G(w_ref) (w / w_ref)^(1 - index); the reference sits far out, where g is
        // defined for every admissible kernel
        constexpr double reference = 1e3;
        return reference * std::pow(t / first_integral(reference), 1.0 / (1.0 - index_));
    }
    return numerics::solve_monotone([this](double w) { return first_integral(w); }, t, 1.0);
}

double solve_blowdown(const numerics::ScalarFn& g, double index, double t) {
    return BlowdownCurve(g, index)(t);
}

namespace {

RatioEvidence ratio_evidence(const BlowdownCurve& num, const BlowdownCurve& den,
                             const std::vector<double>& t_ladder) {
    if (t_ladder.size() < 3) throw DomainError("ratio ladder needs at least three rungs");
    for (std::size_t i = 1; i < t_ladder.size(); ++i)
        if (!(t_ladder[i] < t_ladder[i - 1])) throw DomainError("t ladder must decrease toward 0");
    RatioEvidence ev;
    ev.ladder = t_ladder;
    for (double t : t_ladder) ev.ratios.push_back(num(t) / den(t));
    ev.limit = numerics::extrapolate_ladder(ev.ratios, 1e-9);
    const auto [lo, hi] = std::minmax_element(ev.ratios.begin(), ev.ratios.end());
    ev.min_ratio = *lo;
    ev.max_ratio = *hi;
    return ev;
}

}  // namespace

RatioEvidence equivalence_check(const numerics::ScalarFn& g, double g_index, const numerics::ScalarFn& h,
                                double h_index, const std::vector<double>& t_ladder) {
    return ratio_evidence(BlowdownCurve(g, g_index), BlowdownCurve(h, h_index), t_ladder);
}

RatioEvidence two_scale_equivalence(const numerics::ScalarFn& g, double theta, const numerics::ScalarFn& h,
                                    double gamma, double c, const std::vector<double>& t_ladder) {
    if (!(c > 0.0)) throw DomainError("scale factor c must be positive");
    if (!(gamma + theta > 1.0)) throw ConfigError("two-scale equivalence needs gamma + theta > 1");
    const BlowdownCurve v([g, h, c](double s) { return g(c * s) * h(s); }, gamma + theta);
    const BlowdownCurve w([g, h](double s) { return g(s) * h(s); }, gamma + theta);
    return ratio_evidence(w, v, t_ladder);
}

}  // namespace blowup
