#include "blowup/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "blowup/error.hpp"

namespace blowup {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string rates_csv(const std::vector<RateReport>& reports) {
    std::ostringstream out;
    out << kRatesHeader << "\n";
    for (const auto& r : reports) {
        out << csv_field(r.quantity) << "," << format_number(r.predicted) << "," << format_number(r.extrapolated)
            << "," << format_number(r.relative_error) << "," << format_number(r.tolerance) << ","
            << csv_field(r.method) << "," << (r.converged ? 1 : 0) << "," << (r.asserted ? 1 : 0) << ","
            << (r.pass ? 1 : 0) << "," << csv_field(r.note) << "\n";
    }
    return out.str();
}

std::string ladders_csv(const std::vector<RateReport>& reports) {
    std::ostringstream out;
    out << kLaddersHeader << "\n";
    for (const auto& r : reports)
        for (std::size_t k = 0; k < r.ratios.size() && k < r.ladder_x.size(); ++k)
            out << csv_field(r.quantity) << "," << format_number(r.ladder_x[k]) << "," << format_number(r.ratios[k])
                << "\n";
    return out.str();
}

std::string summary_text(const ExperimentResult& result) {
    std::ostringstream out;
    char line[512];
    out << "experiment: " << result.name << "\n";
    std::snprintf(line, sizeof line, "%-28s %14s %14s %11s %10s %-10s %-8s %s\n", "quantity", "predicted", "measured",
                  "rel_error", "tolerance", "method", "status", "note");
    out << line;
    for (const auto& r : result.reports) {
        const char* status = !r.asserted ? (r.pass ? "info" : "info*") : (r.pass ? "PASS" : "FAIL");
        std::snprintf(line, sizeof line, "%-28s %14.6g %14.6g %11.3e %10.3g %-10s %-8s %s\n", r.quantity.c_str(),
                      r.predicted, r.extrapolated, r.relative_error, r.tolerance, r.method.c_str(), status,
                      r.note.c_str());
        out << line;
    }
    for (const auto& f : result.failures)
        out << "FAILURE " << f.stage << " (" << f.kind << "): " << f.message << "\n";
    if (!result.reports.empty() || !result.failures.empty())
        out << "overall: " << (result.passed() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
    file << content;
    file.close();
    if (!file) throw IoError("failed writing '" + path.string() + "'");
}

void field_rows(std::ostringstream& out, const char* name, const SpaceTimeField& u, const std::vector<double>& at) {
    for (double t : at) {
        const std::size_t j = u.nearest_time(t);
        for (std::size_t i = 0; i < u.grid.size(); ++i)
            out << name << "," << format_number(u.times[j]) << "," << format_number(u.grid.coordinate[i]) << ","
                << format_number(u.grid.distance[i]) << "," << format_number(u.values[j][i]) << "\n";
    }
}

std::string solutions_csv(const ExperimentResult& result, std::size_t slices) {
    std::ostringstream out;
    out << kSolutionsHeader << "\n";
    if (result.elliptic) {
        const GridFunction& z = *result.elliptic;
        for (std::size_t i = 0; i < z.grid.size(); ++i)
            out << "elliptic,," << format_number(z.grid.coordinate[i]) << "," << format_number(z.grid.distance[i])
                << "," << format_number(z.values[i]) << "\n";
    }
    std::vector<double> at;
    if (result.lower) {
        // slices spread geometrically over the window, ending at t_star
        const auto& times = result.lower->times;
        const double t_end = times.back();
        const double t_first = std::max(times[1], 1e-3 * t_end);
        for (std::size_t k = 0; k < slices; ++k)
            at.push_back(t_first * std::pow(t_end / t_first, static_cast<double>(k) / static_cast<double>(slices - 1)));
        field_rows(out, "lower", *result.lower, at);
    }
    if (result.upper) field_rows(out, "upper", *result.upper, at);
    return out.str();
}

std::string plot_script(const ExperimentResult& result) {
    std::ostringstream out;
    out << "# gnuplot script for experiment " << result.name << "\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 900,600\n"
        << "set logscale xy\n"
        << "set key left top\n\n"
        << "set output 'solutions.png'\n"
        << "set xlabel 'distance to boundary'\n"
        << "set ylabel 'u'\n"
        << "plot 'solutions.csv' using ($4 > 0 && strcol(1) eq 'lower' ? $4 : 1/0):5 with points pt 7 ps 0.3 "
           "title 'lower', \\\n"
        << "     'solutions.csv' using ($4 > 0 && strcol(1) eq 'upper' ? $4 : 1/0):5 with points pt 7 ps 0.3 "
           "title 'upper', \\\n"
        << "     'solutions.csv' using ($4 > 0 && strcol(1) eq 'elliptic' ? $4 : 1/0):5 with lines title "
           "'elliptic'\n\n"
        << "set output 'ladders.png'\n"
        << "unset logscale y\n"
        << "set xlabel 'ladder point (distance or time)'\n"
        << "set ylabel 'measured / predicted profile'\n";
    std::vector<std::string> names;
    for (const auto& r : result.reports)
        if (!r.ratios.empty()) names.push_back(r.quantity);
    if (names.empty()) {
        out << "plot 1 title 'no ladders'\n";
        return out.str();
    }
    out << "plot ";
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (k > 0) out << ", \\\n     ";
        out << "'ladders.csv' using (strcol(1) eq '" << names[k] << "' ? $2 : 1/0):3 with linespoints title '"
            << names[k] << "'";
    }
    out << "\n";
    return out.str();
}

}  // namespace

void emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir, std::size_t slices) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory '" + out_dir.string() + "'");
    write_file(out_dir / "rates.csv", rates_csv(result.reports));
    write_file(out_dir / "ladders.csv", ladders_csv(result.reports));
    write_file(out_dir / "solutions.csv", solutions_csv(result, std::max<std::size_t>(slices, 2)));
    write_file(out_dir / "summary.txt", summary_text(result));
    write_file(out_dir / "plot.gp", plot_script(result));
}

}  // namespace blowup
