// blowup_lab: command-line driver for the blow-up experiments.
//
//   blowup_lab validate <config>
//   blowup_lab run <config> [--out DIR] [--jobs K] [--tolerance-scale F]
//   blowup_lab suite <name|all> [--out DIR] [--jobs K] [--tolerance-scale F]

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include "blowup/config.hpp"
#include "blowup/error.hpp"
#include "blowup/experiment.hpp"
#include "blowup/report.hpp"

namespace {

struct Flags {
    std::string out;
    std::size_t jobs = 1;
    double tolerance_scale = 1.0;
};

int run_one(blowup::ExperimentConfig cfg, const Flags& flags, const std::filesystem::path& out_dir,
            std::size_t jobs) {
    if (flags.tolerance_scale != 1.0) cfg.scale_tolerances(flags.tolerance_scale);
    cfg.output.directory = out_dir;
    const blowup::ExperimentResult res = blowup::execute_experiment(cfg, jobs);
    blowup::emit_report(res, out_dir, cfg.output.slices);
    std::cout << blowup::summary_text(res) << "artifacts: " << out_dir.string() << "\n";
    return res.exit_status();
}

int run_suites(const std::vector<std::string>& names, const Flags& flags) {
    const std::filesystem::path root = flags.out.empty() ? std::filesystem::path("suites") : std::filesystem::path(flags.out);
    std::vector<blowup::ExperimentConfig> configs;
    for (const auto& n : names) configs.push_back(blowup::named_suite(n));
    if (configs.size() == 1)
        return run_one(configs.front(), flags, flags.out.empty() ? root / names[0] : root, flags.jobs);

    // experiments of a batch run concurrently, one output directory each
    std::vector<int> status(configs.size(), 1);
    std::vector<blowup::ExperimentResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    {
        std::vector<std::jthread> pool;
        const std::size_t inner = std::max<std::size_t>(1, flags.jobs / configs.size());
        for (std::size_t k = 0; k < configs.size(); ++k) {
            pool.emplace_back([&, k] {
                try {
                    auto cfg = configs[k];
                    if (flags.tolerance_scale != 1.0) cfg.scale_tolerances(flags.tolerance_scale);
                    results[k] = blowup::execute_experiment(cfg, inner);
                    blowup::emit_report(results[k], root / names[k], cfg.output.slices);
                    status[k] = results[k].exit_status();
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
    }
    int worst = 0;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        if (errors[k]) std::rethrow_exception(errors[k]);
        std::cout << blowup::summary_text(results[k]) << "artifacts: " << (root / names[k]).string() << "\n\n";
        worst = std::max(worst, status[k]);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary and initial blow-up experiments for the weighted p-Laplacian heat equation"};
    app.require_subcommand(1);
    Flags flags;
    std::string config_path;
    std::string suite_name;

    auto add_run_flags = [&flags](CLI::App* sub) {
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::Range(1, 256));
        sub->add_option("--tolerance-scale", flags.tolerance_scale, "Multiply the relative pass tolerances")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a config file");
    validate->add_option("config", config_path, "Config file")->required();

    CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file")->required();
    add_run_flags(run);

    CLI::App* suite = app.add_subcommand("suite", "Run a named acceptance suite (or 'all')");
    suite->add_option("name", suite_name, "Suite name")->required();
    add_run_flags(suite);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const auto cfg = blowup::load_config(config_path);
            std::cout << config_path << ": valid (experiment '" << cfg.name << "')\n";
            return 0;
        }
        if (*run) {
            const auto cfg = blowup::load_config(config_path);
            const std::filesystem::path out = flags.out.empty() ? cfg.output.directory : std::filesystem::path(flags.out);
            return run_one(cfg, flags, out, flags.jobs);
        }
        if (*suite) {
            std::vector<std::string> names;
            if (suite_name == "all")
                names = blowup::suite_names();
            else
                names.push_back(suite_name);
            return run_suites(names, flags);
        }
    } catch (const blowup::ConfigError& e) {
        std::cerr << "configuration error:\n" << e.what() << "\n";
        return 2;
    } catch (const blowup::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
