#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "blowup/config.hpp"
#include "blowup/elliptic.hpp"
#include "blowup/parabolic.hpp"
#include "blowup/rates.hpp"

namespace blowup {

/// A pipeline stage that threw; the run continues with the stages that do
/// not depend on it.
struct FailureRecord {
    std::string stage;
    std::string kind;  // error class
    std::string message;
};

struct ExperimentResult {
    std::string name;
    std::vector<RateReport> reports;
    std::vector<FailureRecord> failures;
    std::optional<GridFunction> elliptic;
    std::optional<SpaceTimeField> lower;  // minimal solution
    std::optional<SpaceTimeField> upper;  // finest shrunken-domain solution

    /// True when no stage failed and every asserted report passes.
    bool passed() const;
    int exit_status() const { return passed() ? 0 : 1; }
};

/// Runs the solve pipeline of `cfg` (elliptic companion, minimal and maximal
/// fields, enabled checks) without writing anything. Independent stages run
/// on up to `jobs` threads.
ExperimentResult execute_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

/// execute_experiment followed by emit_report into cfg.output.directory;
/// returns the exit status (nonzero iff a stage failed or an asserted check
/// failed). Artifacts are written in either case.
int run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

}  // namespace blowup
