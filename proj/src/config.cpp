#include "blowup/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "blowup/error.hpp"
#include "blowup/karamata.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

Domain ExperimentConfig::domain() const {
    if (problem.domain == "ball") return Domain::ball(problem.radius, problem.dimension);
    return Domain::interval(problem.a, problem.b);
}

ParabolicProblem ExperimentConfig::parabolic() const {
    ParabolicProblem prob;
    prob.domain = domain();
    prob.p = problem.p;
    prob.f = Nonlinearity::from_key(problem.f);
    prob.kernel = WeightKernel::from_key(problem.k, problem.mu.value_or(2.0 * prob.domain.diameter()));
    const double beta = problem.beta;
    const double growth = problem.beta_growth;
    if (beta != 1.0 || growth != 0.0) prob.beta = [beta, growth](double t) { return beta * (1.0 + growth * t); };
    prob.horizon = problem.horizon;
    prob.t_star = problem.t_star;
    return prob;
}

EllipticProblem ExperimentConfig::elliptic() const { return parabolic().frozen_at(0.0); }

HalfGrid ExperimentConfig::grid() const { return build_half_grid(domain(), solver.cells, solver.grading); }

std::vector<double> ExperimentConfig::times(std::size_t steps) const {
    return build_time_grid(problem.t_star, steps, solver.time_grading);
}

CapLadder ExperimentConfig::cap_ladder() const {
    CapLadder ladder;
    ladder.start = solver.cap_start;
    ladder.ratio = solver.cap_ratio;
    ladder.max_rungs = solver.cap_rungs;
    ladder.rel_tol = solver.cap_tolerance;
    ladder.interior_fraction = solver.interior_fraction;
    return ladder;
}

ParabolicOptions ExperimentConfig::parabolic_options() const {
    ParabolicOptions opts;
    opts.newton.tolerance = solver.newton_tolerance;
    return opts;
}

void ExperimentConfig::scale_tolerances(double factor) {
    if (!(factor > 0.0)) throw ConfigError("tolerance scale must be positive");
    verification.rate_tolerance *= factor;
    verification.gap_tolerance *= factor;
}

namespace {

struct Issue {
    std::size_t line;
    std::string text;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::size_t> to_count(const std::string& s) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> to_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    return std::nullopt;
}

std::optional<std::vector<double>> to_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto v = to_double(trim(item));
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

// A setter returns an error message for a malformed value, or an empty string.
using Setter = std::function<std::string(ExperimentConfig&, const std::string&)>;

template <class Get>
Setter number(Get get) {
    return [get](ExperimentConfig& c, const std::string& v) -> std::string {
        const auto x = to_double(v);
        if (!x) return "malformed number '" + v + "'";
        get(c) = *x;
        return {};
    };
}

template <class Get>
Setter count(Get get) {
    return [get](ExperimentConfig& c, const std::string& v) -> std::string {
        const auto x = to_count(v);
        if (!x) return "malformed count '" + v + "'";
        get(c) = *x;
        return {};
    };
}

template <class Get>
Setter flag(Get get) {
    return [get](ExperimentConfig& c, const std::string& v) -> std::string {
        const auto x = to_bool(v);
        if (!x) return "malformed boolean '" + v + "' (use true/false)";
        get(c) = *x;
        return {};
    };
}

template <class Get>
Setter list(Get get) {
    return [get](ExperimentConfig& c, const std::string& v) -> std::string {
        const auto x = to_list(v);
        if (!x) return "malformed number list '" + v + "'";
        get(c) = *x;
        return {};
    };
}

template <class Get>
Setter text(Get get) {
    return [get](ExperimentConfig& c, const std::string& v) -> std::string {
        if (v.empty()) return "empty value";
        get(c) = v;
        return {};
    };
}

#define FIELD(block, member) [](ExperimentConfig& c) -> auto& { return c.block.member; }

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"problem",
         {{"name", [](ExperimentConfig& c, const std::string& v) -> std::string {
               if (v.empty()) return "empty value";
               c.name = v;
               return {};
           }},
          {"domain", text(FIELD(problem, domain))},
          {"a", number(FIELD(problem, a))},
          {"b", number(FIELD(problem, b))},
          {"radius", number(FIELD(problem, radius))},
          {"dimension", [](ExperimentConfig& c, const std::string& v) -> std::string {
               const auto x = to_count(v);
               if (!x) return "malformed count '" + v + "'";
               c.problem.dimension = static_cast<int>(*x);
               return {};
           }},
          {"p", number(FIELD(problem, p))},
          {"f", text(FIELD(problem, f))},
          {"k", text(FIELD(problem, k))},
          {"mu", number(FIELD(problem, mu))},
          {"beta", number(FIELD(problem, beta))},
          {"beta_growth", number(FIELD(problem, beta_growth))},
          {"horizon", number(FIELD(problem, horizon))},
          {"t_star", number(FIELD(problem, t_star))},
          {"continuous_at_horizon", flag(FIELD(problem, continuous_at_horizon))}}},
        {"solver",
         {{"cells", count(FIELD(solver, cells))},
          {"grading", number(FIELD(solver, grading))},
          {"time_steps", count(FIELD(solver, time_steps))},
          {"time_grading", number(FIELD(solver, time_grading))},
          {"cap_start", number(FIELD(solver, cap_start))},
          {"cap_ratio", number(FIELD(solver, cap_ratio))},
          {"cap_rungs", count(FIELD(solver, cap_rungs))},
          {"cap_tolerance", number(FIELD(solver, cap_tolerance))},
          {"interior_fraction", number(FIELD(solver, interior_fraction))},
          {"eps_ladder", list(FIELD(solver, eps_ladder))},
          {"newton_tolerance", number(FIELD(solver, newton_tolerance))}}},
        {"verification",
         {{"elliptic_rate", flag(FIELD(verification, elliptic_rate))},
          {"initial_rate", flag(FIELD(verification, initial_rate))},
          {"boundary_rate", flag(FIELD(verification, boundary_rate))},
          {"structure", flag(FIELD(verification, structure))},
          {"uniqueness", flag(FIELD(verification, uniqueness))},
          {"rate_tolerance", number(FIELD(verification, rate_tolerance))},
          {"boundary_times", list(FIELD(verification, boundary_times))},
          {"initial_point", number(FIELD(verification, initial_point))},
          {"initial_start", number(FIELD(verification, initial_start))},
          {"initial_stop", number(FIELD(verification, initial_stop))},
          {"richardson", flag(FIELD(verification, richardson))},
          {"structure_tolerance", number(FIELD(verification, structure_tolerance))},
          {"sandwich_lo", number(FIELD(verification, sandwich_lo))},
          {"sandwich_hi", number(FIELD(verification, sandwich_hi))},
          {"gap_tolerance", number(FIELD(verification, gap_tolerance))}}},
        {"output",
         {{"directory", [](ExperimentConfig& c, const std::string& v) -> std::string {
               if (v.empty()) return "empty value";
               c.output.directory = v;
               return {};
           }},
          {"slices", count(FIELD(output, slices))}}},
    };
    return table;
}

#undef FIELD

void require(std::vector<std::string>& out, bool ok, const std::string& message) {
    if (!ok) out.push_back(message);
}

}  // namespace

std::vector<std::string> config_violations(const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    const ProblemBlock& pb = cfg.problem;
    const SolverBlock& sb = cfg.solver;
    const VerificationBlock& vb = cfg.verification;

    bool domain_ok = true;
    if (pb.domain == "interval") {
        domain_ok = pb.b > pb.a;
        require(out, domain_ok, "problem.a/b: interval needs a < b");
    } else if (pb.domain == "ball") {
        domain_ok = pb.radius > 0.0 && pb.dimension >= 2 && pb.dimension <= 3;
        require(out, pb.radius > 0.0, "problem.radius must be positive");
        require(out, pb.dimension >= 2 && pb.dimension <= 3, "problem.dimension must be 2 or 3 for a ball");
    } else {
        domain_ok = false;
        out.push_back("problem.domain: unknown domain '" + pb.domain + "' (interval or ball)");
    }
    require(out, pb.p > 1.0, "problem.p: hypothesis p > 1 violated");

    std::optional<Nonlinearity> f;
    try {
        f = Nonlinearity::from_key(pb.f);
    } catch (const ConfigError& e) {
        out.push_back(std::string("problem.f: ") + e.what());
    }
    std::optional<WeightKernel> kernel;
    double diameter = 1.0;
    if (domain_ok) diameter = cfg.domain().diameter();
    const double mu = pb.mu.value_or(2.0 * diameter);
    require(out, mu > diameter, "problem.mu: kernel support must exceed the domain diameter");
    try {
        kernel = WeightKernel::from_key(pb.k, mu);
    } catch (const std::exception& e) {
        out.push_back(std::string("problem.k: ") + e.what());
    }
    if (f && kernel && pb.p > 1.0) {
        const double rho = f->index();
        const double gate = index_gate(pb.p, kernel->ell());
        if (!(rho > gate)) {
            std::ostringstream msg;
            msg << "index gate violated: rho = " << rho << " is not > max{1, p-1, p-1-(p-2)/ell} = " << gate
                << " (p = " << pb.p << ", ell = " << kernel->ell() << ")";
            out.push_back(msg.str());
        } else {
            const ConditionReport cond = check_conditions(*f, pb.p);
            require(out, cond.f1, "problem.f: measured regular-variation index of f must exceed p - 1");
            require(out, cond.f3, "problem.f: Keller-Osserman integrability condition fails for this p");
        }
    }

    require(out, pb.horizon > 0.0, "problem.horizon must be positive");
    if (pb.continuous_at_horizon) {
        require(out, pb.t_star > 0.0 && pb.t_star <= pb.horizon, "problem.t_star must lie in (0, horizon]");
    } else {
        require(out, pb.t_star > 0.0 && pb.t_star < pb.horizon,
                "problem.t_star must lie in (0, horizon); set continuous_at_horizon = true to solve up to T");
    }
    const double beta_end = pb.beta * (1.0 + pb.beta_growth * pb.t_star);
    require(out, pb.beta > 0.0 && beta_end > 0.0, "problem.beta: the time factor must stay positive on [0, t_star]");

    require(out, sb.cells >= 16, "solver.cells must be at least 16");
    require(out, sb.grading >= 1.0 && sb.grading <= 6.0, "solver.grading must lie in [1, 6]");
    require(out, sb.time_steps >= 8, "solver.time_steps must be at least 8");
    require(out, sb.time_grading >= 1.0 && sb.time_grading <= 6.0, "solver.time_grading must lie in [1, 6]");
    require(out, sb.cap_start > 0.0, "solver.cap_start must be positive");
    require(out, sb.cap_ratio > 1.0, "solver.cap_ratio must exceed 1");
    require(out, sb.cap_rungs >= 2, "solver.cap_rungs must be at least 2");
    require(out, sb.cap_tolerance > 0.0 && sb.cap_tolerance < 1.0, "solver.cap_tolerance must lie in (0, 1)");
    require(out, sb.interior_fraction > 0.0 && sb.interior_fraction < 1.0,
            "solver.interior_fraction must lie in (0, 1)");
    require(out, sb.newton_tolerance > 0.0 && sb.newton_tolerance < 1e-4, "solver.newton_tolerance must lie in (0, 1e-4)");
    bool eps_ok = !sb.eps_ladder.empty();
    for (std::size_t k = 0; k < sb.eps_ladder.size(); ++k) {
        eps_ok = eps_ok && sb.eps_ladder[k] > 0.0 && (k == 0 || sb.eps_ladder[k] < sb.eps_ladder[k - 1]);
        if (domain_ok) eps_ok = eps_ok && 4.0 * sb.eps_ladder[k] < cfg.domain().half_width();
        eps_ok = eps_ok && 4.0 * sb.eps_ladder[k] < pb.t_star;
    }
    require(out, eps_ok, "solver.eps_ladder must be positive, strictly decreasing and small against the domain and t_star");

    require(out, vb.rate_tolerance > 0.0, "verification.rate_tolerance must be positive");
    require(out, vb.gap_tolerance > 0.0, "verification.gap_tolerance must be positive");
    require(out, vb.structure_tolerance >= 0.0, "verification.structure_tolerance must be nonnegative");
    require(out, vb.sandwich_lo > 0.0 && vb.sandwich_lo < vb.sandwich_hi,
            "verification.sandwich_lo/hi must satisfy 0 < lo < hi");
    require(out, vb.initial_start > vb.initial_stop && vb.initial_stop > 0.0 && vb.initial_start < pb.t_star,
            "verification.initial_start/stop must satisfy 0 < stop < start < t_star");
    for (double t : vb.boundary_times)
        require(out, t > 0.0 && t <= pb.t_star, "verification.boundary_times must lie in (0, t_star]");
    if (vb.initial_point && domain_ok)
        require(out, cfg.domain().contains(*vb.initial_point), "verification.initial_point must lie in the domain");
    require(out, cfg.output.slices >= 2, "output.slices must be at least 2");
    return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
    ExperimentConfig cfg;
    std::vector<Issue> issues;
    const auto& table = key_table();
    std::string section;
    std::size_t line_no = 0;
    std::stringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back({line_no, "malformed section header '" + line + "'"});
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!table.contains(section)) issues.push_back({line_no, "unknown section [" + section + "]"});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line_no, "expected 'key = value', got '" + line + "'"});
            continue;
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto block = table.find(section);
        if (section.empty()) {
            issues.push_back({line_no, "key '" + key + "' outside any section"});
            continue;
        }
        if (block == table.end()) continue;  // already reported
        const auto setter = block->second.find(key);
        if (setter == block->second.end()) {
            issues.push_back({line_no, "unknown key '" + key + "' in [" + section + "]"});
            continue;
        }
        if (std::string err = setter->second(cfg, value); !err.empty())
            issues.push_back({line_no, section + "." + key + ": " + err});
    }
    std::ostringstream msg;
    for (const auto& issue : issues) msg << source << ":" << issue.line << ": " << issue.text << "\n";
    if (issues.empty())
        for (const auto& v : config_violations(cfg)) msg << source << ": " << v << "\n";
    const std::string all = msg.str();
    if (!all.empty()) throw ConfigError(all.substr(0, all.size() - 1));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    ExperimentConfig cfg = parse_config(buffer.str(), path.string());
    return cfg;
}

std::vector<std::string> suite_names() { return {"power", "power_beta4", "ball2d", "kernel_linear"}; }

ExperimentConfig named_suite(std::string_view name) {
    ExperimentConfig cfg;
    cfg.name = std::string(name);
    cfg.output.directory = std::string(name);
    VerificationBlock& v = cfg.verification;
    if (name == "power") {
        v.elliptic_rate = v.initial_rate = v.boundary_rate = v.structure = v.uniqueness = true;
    } else if (name == "power_beta4") {
        cfg.problem.beta = 4.0;
        v.elliptic_rate = v.boundary_rate = true;
    } else if (name == "ball2d") {
        cfg.problem.domain = "ball";
        cfg.problem.radius = 1.0;
        cfg.problem.dimension = 2;
        v.elliptic_rate = v.boundary_rate = true;
    } else if (name == "kernel_linear") {
        // xi* of k(s) = s is only defined above K(mu)-level values, reached for t <= 0.25
        cfg.problem.k = "power(1)";
        cfg.problem.horizon = 0.5;
        cfg.problem.t_star = 0.25;
        v.boundary_times = {0.1};
        v.boundary_rate = v.structure = v.uniqueness = true;
    } else {
        std::ostringstream msg;
        msg << "unknown suite '" << name << "'; available:";
        for (const auto& s : suite_names()) msg << " " << s;
        throw ConfigError(msg.str());
    }
    const auto problems = config_violations(cfg);
    if (!problems.empty()) throw ConfigError("suite '" + std::string(name) + "' is inconsistent: " + problems.front());
    return cfg;
}

}  // namespace blowup
