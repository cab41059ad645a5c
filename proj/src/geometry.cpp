#include "blowup/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

Domain Domain::interval(double a, double b) {
    if (!(b > a)) throw DomainError("interval requires b > a");
    return Domain(Kind::interval, a, b, 1);
}

Domain Domain::ball(double radius, int dimension) {
    if (!(radius > 0.0)) throw DomainError("ball requires R > 0");
    if (dimension < 2) throw DomainError("ball requires dimension N >= 2");
    return Domain(Kind::ball, 0.0, radius, dimension);
}

double Domain::half_width() const {
    return is_interval() ? 0.5 * (b_ - a_) : b_;
}

double Domain::diameter() const {
    return is_interval() ? b_ - a_ : 2.0 * b_;
}

bool Domain::contains(double x) const {
    if (is_interval()) return x >= a_ && x <= b_;
    return x >= 0.0 && x <= b_;
}

double Domain::distance_to_boundary(double x) const {
    if (!contains(x)) {
        std::ostringstream msg;
        msg << "point " << x << " lies outside " << describe();
        throw DomainError(msg.str());
    }
    if (is_interval()) return std::min(x - a_, b_ - x);
    return b_ - x;
}

Domain Domain::shrink(double eps) const {
    if (!(eps >= 0.0) || eps >= half_width()) throw DomainError("shrink width must lie in [0, H)");
    if (is_interval()) return interval(a_ + eps, b_ - eps);
    return ball(b_ - eps, dimension_);
}

std::string Domain::describe() const {
    std::ostringstream out;
    if (is_interval())
        out << "interval(" << a_ << "," << b_ << ")";
    else
        out << "ball(R=" << b_ << ",N=" << dimension_ << ")";
    return out.str();
}

double Mesh::min_spacing() const {
    double h = INFINITY;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) h = std::min(h, nodes[i + 1] - nodes[i]);
    return h;
}

double Mesh::max_spacing() const {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) h = std::max(h, nodes[i + 1] - nodes[i]);
    return h;
}

namespace {

void check_mesh_args(std::size_t n_cells, double grading) {
    if (n_cells < 4) throw DomainError("mesh needs at least 4 cells");
    if (!(grading >= 1.0)) throw DomainError("grading exponent must be >= 1");
}

// distance-to-boundary fraction for uniform parameter sigma in [0, 1]
double graded(double sigma, double grading) { return std::pow(sigma, grading); }

}  // namespace

Mesh build_graded_mesh(const Domain& domain, std::size_t n_cells, double grading) {
    check_mesh_args(n_cells, grading);
    Mesh mesh;
    mesh.grading = grading;
    mesh.nodes.resize(n_cells + 1);
    const double n = static_cast<double>(n_cells);
    const double H = domain.half_width();
    if (domain.is_interval()) {
        for (std::size_t i = 0; i <= n_cells; ++i) {
            const double s = static_cast<double>(i);
            if (2 * i <= n_cells)
                mesh.nodes[i] = domain.a() + H * graded(2.0 * s / n, grading);
            else
                mesh.nodes[i] = domain.b() - H * graded(2.0 * (n - s) / n, grading);
        }
        mesh.nodes.front() = domain.a();
        mesh.nodes.back() = domain.b();
        mesh.boundary_nodes = {0, n_cells};
    } else {
        for (std::size_t i = 0; i <= n_cells; ++i)
            mesh.nodes[i] = H * (1.0 - graded(1.0 - static_cast<double>(i) / n, grading));
        mesh.nodes.front() = 0.0;
        mesh.nodes.back() = H;
        mesh.boundary_nodes = {n_cells};
    }
    return mesh;
}

double HalfGrid::min_spacing() const {
    return *std::min_element(spacing.begin(), spacing.end());
}

namespace {

void fill_metric(HalfGrid& g) {
    const std::size_t n = g.y.size();
    const double N = static_cast<double>(g.metric_exponent + 1);
    g.spacing.resize(n - 1);
    g.edge_weight.resize(n - 1);
    std::vector<double> mid(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        g.spacing[i] = g.y[i + 1] - g.y[i];
        mid[i] = 0.5 * (g.y[i] + g.y[i + 1]);
        g.edge_weight[i] = std::pow(mid[i], g.metric_exponent);
    }
    g.volume.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? g.y.front() : mid[i - 1];
        const double hi = i + 1 == n ? g.y.back() : mid[i];
        g.volume[i] = (std::pow(hi, N) - std::pow(lo, N)) / N;
    }
}

}  // namespace

HalfGrid HalfGrid::shrunk(double eps, double grading) const {
    if (!(eps > 0.0) || !(2.0 * eps < distance.front())) throw DomainError("shrink parameter outside (0, H/2)");
    if (!(grading >= 1.0)) throw DomainError("grading must be >= 1");
    std::size_t keep = 0;
    while (keep < y.size() && distance[keep] >= 2.0 * eps) ++keep;
    if (keep < 2) throw DomainError("shrunken grid keeps fewer than two nodes");
    const std::size_t cells = std::max<std::size_t>(y.size() - keep, 4);
    const double origin = coordinate.front() - y.front();
    const double h = distance.front();  // distance of the symmetry point
    const double y_last = y[keep - 1];
    const double y_end = h - eps;
    HalfGrid g;
    g.metric_exponent = metric_exponent;
    g.y.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(keep));
    for (std::size_t q = 1; q <= cells; ++q) {
        const double s = static_cast<double>(q) / static_cast<double>(cells);
        g.y.push_back(q == cells ? y_end : y_end - (y_end - y_last) * graded(1.0 - s, grading));
    }
    for (double v : g.y) {
        g.coordinate.push_back(origin + v);
        g.distance.push_back(h - v);
    }
    g.distance.back() = eps;
    fill_metric(g);
    return g;
}

HalfGrid build_half_grid(const Domain& domain, std::size_t n_cells, double grading) {
    check_mesh_args(n_cells, grading);
    const std::size_t m = domain.is_interval() ? (n_cells + 1) / 2 : n_cells;
    if (m < 2) throw DomainError("half grid needs at least 2 cells");
    const double H = domain.half_width();
    HalfGrid g;
    g.metric_exponent = domain.metric_exponent();
    g.y.resize(m + 1);
    g.distance.resize(m + 1);
    g.coordinate.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double frac = graded(1.0 - static_cast<double>(i) / static_cast<double>(m), grading);
        g.distance[i] = H * frac;
        g.y[i] = H - g.distance[i];
    }
    g.y.front() = 0.0;
    g.y.back() = H;
    g.distance.back() = 0.0;
    const double origin = domain.is_interval() ? 0.5 * (domain.a() + domain.b()) : 0.0;
    for (std::size_t i = 0; i <= m; ++i) g.coordinate[i] = origin + g.y[i];
    fill_metric(g);
    return g;
}

}  // namespace blowup
