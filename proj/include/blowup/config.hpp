#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/elliptic.hpp"
#include "blowup/geometry.hpp"
#include "blowup/parabolic.hpp"

namespace blowup {

/// [problem]: the equation, its weight and the solved window.
struct ProblemBlock {
    std::string domain = "interval";  // "interval" or "ball"
    double a = 0.0;                   // interval end points
    double b = 1.0;
    double radius = 1.0;  // ball
    int dimension = 2;    // ball
    double p = 2.0;
    std::string f = "power(2)";
    std::string k = "const";
    /// Kernel support; defaults to twice the domain diameter.
    std::optional<double> mu;
    /// beta(t) = beta * (1 + beta_growth * t); must stay positive on [0, t_star].
    double beta = 1.0;
    double beta_growth = 0.0;
    double horizon = 1.0;
    double t_star = 0.5;
    /// Unlocks t_star = horizon (two-sided continuity of the weight at T).
    bool continuous_at_horizon = false;
};

/// [solver]: meshes and ladders.
struct SolverBlock {
    std::size_t cells = 2000;
    double grading = 3.0;
    std::size_t time_steps = 800;
    double time_grading = 3.0;
    double cap_start = 10.0;
    double cap_ratio = 2.0;
    std::size_t cap_rungs = 80;
    double cap_tolerance = 1e-6;
    double interior_fraction = 0.05;
    std::vector<double> eps_ladder = {4e-3, 1e-3, 2.5e-4};
    double newton_tolerance = 1e-10;
};

/// [verification]: which statements to check and how strictly.
struct VerificationBlock {
    bool elliptic_rate = false;
    bool initial_rate = false;
    bool boundary_rate = false;
    bool structure = false;
    bool uniqueness = false;
    double rate_tolerance = 0.05;
    std::vector<double> boundary_times = {0.1, 0.2};
    /// Point of the initial-rate ladder; the domain center when unset.
    std::optional<double> initial_point;
    double initial_start = 0.1;
    double initial_stop = 1e-3;
    /// Richardson extrapolation in time (second trajectory with 2x steps).
    bool richardson = true;
    double structure_tolerance = 1e-8;
    double sandwich_lo = 1e-3;
    double sandwich_hi = 1e3;
    double gap_tolerance = 0.02;

    bool any() const { return elliptic_rate || initial_rate || boundary_rate || structure || uniqueness; }
};

/// [output]
struct OutputBlock {
    std::filesystem::path directory = "blowup_out";
    /// Number of time slices written to solutions.csv.
    std::size_t slices = 9;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ProblemBlock problem;
    SolverBlock solver;
    VerificationBlock verification;
    OutputBlock output;

    Domain domain() const;
    ParabolicProblem parabolic() const;
    EllipticProblem elliptic() const;
    HalfGrid grid() const;
    std::vector<double> times(std::size_t steps) const;
    CapLadder cap_ladder() const;
    ParabolicOptions parabolic_options() const;
    /// Multiplies every relative pass tolerance by `factor`.
    void scale_tolerances(double factor);
};

/// Every violated range, key or hypothesis of a parsed config (empty when valid).
std::vector<std::string> config_violations(const ExperimentConfig& cfg);

/// Parses the key-value text; throws ConfigError listing every problem, each
/// with its `source:line` context.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads and parses a config file.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Named acceptance suites: power, power_beta4, ball2d, kernel_linear.
std::vector<std::string> suite_names();
ExperimentConfig named_suite(std::string_view name);

}  // namespace blowup
