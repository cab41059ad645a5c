#include "blowup/discrete_operator.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/error.hpp"

namespace blowup {

namespace {

struct EdgeFlux {
    double flux;
    double slope;  // dF/du_{i+1} = -dF/du_i
};

inline EdgeFlux edge_flux(double p, double eps, double weight, double h, double du) {
    const double g = du / h;
    if (p == 2.0) return {weight * g, weight / h};
    const double q = g * g + eps * eps;
    const double a = std::pow(q, 0.5 * (p - 2.0));
    return {weight * a * g, weight * (a / q) * ((p - 1.0) * g * g + eps * eps) / h};
}

}  // namespace

void evaluate_residual(const DiscreteSystem& sys, std::span<const double> u, std::span<double> residual,
                       std::span<double> scale) {
    const HalfGrid& g = *sys.grid;
    const std::size_t m = g.boundary_index();
    double left = 0.0;
    double left_size = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto e = edge_flux(sys.p, sys.regularization, g.edge_weight[i], g.spacing[i], u[i + 1] - u[i]);
        const double right = e.flux;
        // flux magnitude plus the rounding-relevant size slope * |u| of its arguments
        const double right_size = std::abs(right) + e.slope * (std::abs(u[i]) + std::abs(u[i + 1]));
        double fv = 0.0;
        double df = 0.0;
        sys.f->evaluate(u[i], fv, df);
        const double v = g.volume[i];
        double r = -(right - left) + v * sys.absorption[i] * fv;
        double s = right_size + left_size + v * std::abs(sys.absorption[i] * fv);
        if (sys.inv_dt > 0.0) {
            r += v * sys.inv_dt * (u[i] - sys.previous[i]);
            s += v * sys.inv_dt * (std::abs(u[i]) + std::abs(sys.previous[i]));
        }
        if (!sys.source.empty()) {
            r -= v * sys.source[i];
            s += v * std::abs(sys.source[i]);
        }
        residual[i] = r;
        scale[i] = s;
        left = right;
        left_size = right_size;
    }
}

double scaled_residual_norm(const DiscreteSystem& sys, std::span<const double> u) {
    const std::size_t m = sys.grid->boundary_index();
    std::vector<double> r(m);
    std::vector<double> s(m);
    evaluate_residual(sys, u, r, s);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (r[i] == 0.0) continue;
        worst = std::max(worst, std::abs(r[i]) / std::max(s[i], 1e-300));
    }
    return worst;
}

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag, std::span<const double> super,
                       std::span<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double denom = diag[0];
    c[0] = n > 1 ? super[0] / denom : 0.0;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - sub[i] * c[i - 1];
        if (i + 1 < n) c[i] = super[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

NewtonStats solve_newton(const DiscreteSystem& sys, std::vector<double>& u, const NewtonOptions& opts) {
    const HalfGrid& g = *sys.grid;
    const std::size_t m = g.boundary_index();
    if (u.size() != g.size()) throw SolverError("Newton: state size does not match grid");
    u[m] = sys.boundary_value;

    std::vector<double> res(m), scale(m), sub(m), diag(m), super(m), step(m), trial(u.size());
    NewtonStats stats;

    auto norm_of = [&](std::span<const double> r, std::span<const double> s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (r[i] != 0.0) worst = std::max(worst, std::abs(r[i]) / std::max(s[i], 1e-300));
        return worst;
    };
    // Line-search merit: L2 norm of the rows weighted by their scales frozen
    // at the current iterate. With fixed weights the Newton direction is a
    // descent direction; the scaled max-norm (the convergence test) is not a
    // merit function far from the solution.
    std::vector<double> weight(m);
    auto merit_of = [&](std::span<const double> r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = r[i] * weight[i];
            sum += w * w;
        }
        return sum;
    };

    evaluate_residual(sys, u, res, scale);
    double norm = norm_of(res, scale);
    for (stats.iterations = 0; stats.iterations < opts.max_iterations; ++stats.iterations) {
        if (!std::isfinite(norm)) break;
        if (norm <= opts.tolerance) {
            stats.converged = true;
            break;
        }
        for (std::size_t i = 0; i < m; ++i) weight[i] = 1.0 / std::max(scale[i], 1e-300);
        const double merit = merit_of(res);
        // Jacobian
        double left_slope = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto e = edge_flux(sys.p, sys.regularization, g.edge_weight[i], g.spacing[i], u[i + 1] - u[i]);
            double fv = 0.0;
            double df = 0.0;
            sys.f->evaluate(u[i], fv, df);
            diag[i] = e.slope + left_slope + g.volume[i] * (sys.absorption[i] * df + sys.inv_dt);
            super[i] = -e.slope;
            sub[i] = -left_slope;
            left_slope = e.slope;
            step[i] = -res[i];
        }
        solve_tridiagonal(sub, diag, super, step);

        double lambda = 1.0;
        double trial_merit = INFINITY;
        std::size_t projected = 0;
        for (int ls = 0; ls < 40; ++ls) {
            projected = 0;
            for (std::size_t i = 0; i < m; ++i) {
                trial[i] = u[i] + lambda * step[i];
                if (!(trial[i] > 0.0) && u[i] > 0.0) {
                    trial[i] = 0.5 * u[i];
                    ++projected;
                }
            }
            trial[m] = u[m];
            evaluate_residual(sys, trial, res, scale);
            trial_merit = merit_of(res);
            if (trial_merit <= (1.0 - 1e-4 * lambda) * merit) break;
            lambda *= 0.5;
        }
        stats.projections += projected;
        double max_rel_step = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            max_rel_step = std::max(max_rel_step, std::abs(trial[i] - u[i]) / std::max(std::abs(u[i]), 1e-300));
        const bool decreased = trial_merit < merit;
        if (decreased) {
            std::copy(trial.begin(), trial.end(), u.begin());
            norm = norm_of(res, scale);
        }
        // no further progress: accept rounding-level stagnation near the tolerance
        if (!decreased || max_rel_step <= 1e-15) {
            if (!decreased) evaluate_residual(sys, u, res, scale);
            norm = norm_of(res, scale);
            if (norm <= 1e3 * opts.tolerance) stats.converged = true;
            ++stats.iterations;
            break;
        }
    }
    stats.residual = norm;
    if (norm <= opts.tolerance) stats.converged = true;
    return stats;
}

}  // namespace blowup
