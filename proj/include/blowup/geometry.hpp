#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace blowup {

/// Interval (a, b) or a radially symmetric ball of radius R in R^N.
///
/// Both reduce the p-Laplacian to a single spatial variable. For the ball the
/// coordinate is the radius r in [0, R]; the only boundary point is r = R.
class Domain {
public:
    enum class Kind { interval, ball };

    static Domain interval(double a, double b);
    static Domain ball(double radius, int dimension);

    Kind kind() const { return kind_; }
    bool is_interval() const { return kind_ == Kind::interval; }
    double a() const { return a_; }
    double b() const { return b_; }
    double radius() const { return b_; }
    int dimension() const { return dimension_; }

    /// Distance from the symmetry point (interval midpoint or ball center) to
    /// the boundary.
    double half_width() const;
    double diameter() const;
    /// Exponent of the radial metric weight r^{N-1}; zero for intervals.
    int metric_exponent() const { return dimension_ - 1; }

    /// d(x, boundary). For balls x is the radius.
    double distance_to_boundary(double x) const;
    bool contains(double x) const;

    /// Shrunken domain {d(x) > eps}.
    Domain shrink(double eps) const;

    std::string describe() const;

private:
    Domain(Kind kind, double a, double b, int dimension)
        : kind_(kind), a_(a), b_(b), dimension_(dimension) {}

    Kind kind_;
    double a_;
    double b_;
    int dimension_;
};

/// Ordered node set resolving boundary layers.
struct Mesh {
    std::vector<double> nodes;
    double grading = 1.0;
    std::vector<std::size_t> boundary_nodes;

    std::size_t size() const { return nodes.size(); }
    std::size_t cells() const { return nodes.empty() ? 0 : nodes.size() - 1; }
    double min_spacing() const;
    double max_spacing() const;
};

/// Graded mesh: node distance to the boundary follows s^grading for a uniform
/// parameter s, applied from each boundary endpoint toward the midpoint
/// (intervals) or from r = R toward the center (balls).
Mesh build_graded_mesh(const Domain& domain, std::size_t n_cells, double grading);

/// Computational half-domain grid used by the solvers.
///
/// Coordinate y runs from the symmetry point (y = 0, zero flux) to the
/// boundary (y = H, Dirichlet). Finite-volume metric data are precomputed:
/// volume[i] is the measure of the control volume of node i under the weight
/// y^{N-1}, edge_weight[i] is y_{i+1/2}^{N-1}, spacing[i] = y_{i+1} - y_i.
struct HalfGrid {
    std::vector<double> y;
    std::vector<double> coordinate;  // physical x (interval, right half) or r (ball)
    std::vector<double> distance;    // d(x) = H - y
    std::vector<double> volume;
    std::vector<double> edge_weight;
    std::vector<double> spacing;
    int metric_exponent = 0;

    std::size_t size() const { return y.size(); }
    /// Index of the Dirichlet node.
    std::size_t boundary_index() const { return y.size() - 1; }
    double min_spacing() const;

    /// Grid of the shrunken domain {d > eps}: the nodes with d >= 2 eps are
    /// kept unchanged (so they are shared with this grid) and the remaining
    /// zone is re-meshed with as many cells, graded toward the new Dirichlet
    /// node at d = eps with the given exponent. Distances stay those of the
    /// original domain.
    HalfGrid shrunk(double eps, double grading) const;
};

/// Half-domain grid with n_cells / 2 (intervals) or n_cells (balls) cells and
/// the same grading map as build_graded_mesh.
HalfGrid build_half_grid(const Domain& domain, std::size_t n_cells, double grading);

}  // namespace blowup
