#pragma once

// Runs one configured experiment and writes its files:
//   trajectory.csv  t plus physical state columns (and model extras)
//   events.csv      impacts, surface crossings or impulse jumps
//   strobe.csv      impulse-instant snapshots (duffing only)
//   acceleration.csv  second derivatives (pwl with nstt-asymptotic only)
//   metadata.json   config echo, hash, integrator stats, summary metrics
// Every CSV starts with "# config_hash=<hex>"; floats use %.17g.

#include "nonsmooth/config.hpp"
#include "nonsmooth/validation.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nonsmooth {

struct RunSummary {
    std::filesystem::path dir;
    std::string config_hash;
    std::vector<std::string> files;
    nlohmann::json metrics;
};

/// Integrates and writes every output file into `dir` (created if needed).
/// Throws ConfigError, IntegrationError or std::runtime_error on I/O.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir);

struct SweepResult {
    std::vector<RunSummary> runs;
    /// One entry per failed value, "value: message".
    std::vector<std::string> failures;
};

/// Runs one experiment per value of `param` (see set_config_value) in
/// parallel, each into its own subdirectory of `root`, and writes
/// root/sweep.csv indexing them.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values, const std::filesystem::path& root,
                      unsigned jobs = 0);

/// Checks that metadata.json's hash matches its config echo and that every
/// listed file carries the same hash. Criterion number 0 marks these checks.
std::vector<Check> verify_run_directory(const std::filesystem::path& dir);

}  // namespace nonsmooth
