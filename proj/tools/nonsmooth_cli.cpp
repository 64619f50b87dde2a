// nonsmooth: run configured experiments, sweeps and the acceptance suite.
//
// Exit codes: 0 success, 1 validation failure, 2 bad config or arguments,
// 3 integration failure, 4 I/O failure.

#include "nonsmooth/config.hpp"
#include "nonsmooth/experiment.hpp"
#include "nonsmooth/validation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace nonsmooth;

namespace {

enum Exit { ok = 0, validation_failed = 1, bad_config = 2, solver_failed = 3, io_failed = 4 };

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return solver_failed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return solver_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_failed;
    }
}

ExperimentConfig load_with_overrides(const std::string& path, const CLI::Option* seed_opt,
                                     std::uint64_t seed, const std::string& out) {
    ExperimentConfig cfg = load_config(path);
    if (seed_opt->count()) {
        cfg.seed = seed;
        validate_config(cfg);
    }
    if (!out.empty()) cfg.output_dir = out;
    return cfg;
}

void print_models() {
    std::cout << fmt::format("{:<14} {:<36} {}\n", "model", "transforms", "parameters");
    for (const auto& m : model_catalog()) {
        std::string transforms, params;
        for (const auto& t : m.transforms) transforms += (transforms.empty() ? "" : ", ") + t;
        for (const auto& [k, v] : m.defaults) {
            params += fmt::format("{}{}={:g}", params.empty() ? "" : " ", k, v);
        }
        std::cout << fmt::format("{:<14} {:<36} {}{}\n", m.id, transforms, params,
                                 m.stochastic ? " (needs seed)" : "");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonsmooth transformations: experiments and validation"};
    app.require_subcommand(1);

    std::string out;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Run one experiment from a config file");
    std::string run_config;
    run->add_option("config", run_config, "Config file (YAML)")->required()->check(CLI::ExistingFile);
    auto* run_seed = run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out, "Output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "Run one experiment per parameter value");
    std::string sweep_config, param;
    std::vector<double> values;
    unsigned jobs = 0;
    sweep->add_option("config", sweep_config, "Config file (YAML)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", param, "Model parameter, seed, time.* or integrator.*")->required();
    sweep->add_option("--values", values, "Values to run")->required()->expected(1, -1);
    sweep->add_option("--jobs", jobs, "Parallel runs (0: one per core)");
    auto* sweep_seed = sweep->add_option("--seed", seed, "Override the config seed");
    sweep->add_option("--out", out, "Root directory for the runs (overrides output.dir)");

    auto* validate = app.add_subcommand("validate", "Run the acceptance criteria");
    bool as_json = false;
    ValidationOptions vopt;
    std::vector<std::string> run_dirs;
    validate->add_flag("--json", as_json, "Print the report as JSON");
    validate->add_option("--rel-tol", vopt.integrator.rel_tol, "Integrator relative tolerance");
    validate->add_option("--abs-tol", vopt.integrator.abs_tol, "Integrator absolute tolerance");
    validate->add_option("--seed", vopt.seed, "Seed for the randomized criteria");
    validate->add_option("--out", out, "Also write report.json and report.txt here");
    validate->add_option("--check-run", run_dirs, "Cross-check config hashes of run directories")
        ->check(CLI::ExistingDirectory);

    app.add_subcommand("models", "List models, transforms and default parameters");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("models")) {
        print_models();
        return ok;
    }

    if (run->parsed()) {
        return guarded([&] {
            const auto cfg = load_with_overrides(run_config, run_seed, seed, out);
            const auto summary = run_experiment(cfg, cfg.output_dir);
            std::cout << "wrote " << summary.dir.string() << " (config_hash=" << summary.config_hash
                      << ")\n";
            for (const auto& [k, v] : summary.metrics.items()) {
                std::cout << "  " << k << " = " << v.dump() << '\n';
            }
            return static_cast<int>(ok);
        });
    }

    if (sweep->parsed()) {
        return guarded([&] {
            const auto cfg = load_with_overrides(sweep_config, sweep_seed, seed, out);
            const auto result = run_sweep(cfg, param, values, cfg.output_dir, jobs);
            for (const auto& r : result.runs) {
                std::cout << "wrote " << r.dir.string() << " (config_hash=" << r.config_hash << ")\n";
            }
            for (const auto& f : result.failures) std::cerr << "failed: " << f << '\n';
            return static_cast<int>(result.failures.empty() ? ok : solver_failed);
        });
    }

    return guarded([&] {
        auto report = run_validation(vopt);
        for (const auto& dir : run_dirs) {
            for (auto& c : verify_run_directory(dir)) report.checks.push_back(std::move(c));
        }
        const std::string text = report.table();
        const std::string json = report.to_json().dump(2) + "\n";
        std::cout << (as_json ? json : text);
        if (!out.empty()) {
            fs::create_directories(out);
            std::ofstream(fs::path(out) / "report.json") << json;
            std::ofstream(fs::path(out) / "report.txt") << text;
        }
        return static_cast<int>(report.passed() ? ok : validation_failed);
    });
}
