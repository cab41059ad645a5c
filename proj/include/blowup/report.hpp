#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blowup/experiment.hpp"
#include "blowup/rates.hpp"

namespace blowup {

/// Column order of rates.csv.
inline constexpr const char* kRatesHeader =
    "quantity,predicted,measured,relative_error,tolerance,method,converged,asserted,pass,note";
/// Column order of ladders.csv and solutions.csv.
inline constexpr const char* kLaddersHeader = "quantity,x,ratio";
inline constexpr const char* kSolutionsHeader = "field,time,coordinate,distance,value";

/// Scientific notation with 12 significant digits ("nan"/"inf" spelled out).
std::string format_number(double v);

/// RFC-4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(const std::string& s);

/// CSV text of the reports (header plus one row per report).
std::string rates_csv(const std::vector<RateReport>& reports);
std::string ladders_csv(const std::vector<RateReport>& reports);

/// Human-readable table; header lines only for an empty result.
std::string summary_text(const ExperimentResult& result);

/// Writes solutions.csv, rates.csv, ladders.csv, summary.txt and plot.gp
/// into out_dir (created when missing). Throws IoError when it cannot write.
/// Identical results produce byte-identical files.
void emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir, std::size_t slices = 9);

}  // namespace blowup
