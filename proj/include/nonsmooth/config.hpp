#pragma once

// Experiment configuration: a YAML document with fixed sections (see
// docs/config.md for the grammar). Every key is checked; anything unknown is
// rejected with its line number.

#include "nonsmooth/integrators.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nonsmooth {

/// Invalid or unreadable configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, std::size_t line, const std::string& message);

    const std::string& field() const { return field_; }
    std::size_t line() const { return line_; }
    /// The diagnostic without the line and field prefix.
    const std::string& message() const { return message_; }

private:
    std::string field_;
    std::size_t line_;
    std::string message_;
};

struct ExperimentConfig {
    std::string model;
    /// Complete parameter set after defaults are filled in.
    std::map<std::string, double> params;
    std::string transform = "none";
    /// Empty selects the model's default initial state.
    State initial_state;
    TimeSpan time{0.0, 0.0};
    double output_step = 0.01;
    IntegratorConfig integrator;
    std::optional<std::uint64_t> seed;
    std::string output_dir = "out";
};

/// One row of the model/transform table.
struct ModelInfo {
    std::string id;
    std::vector<std::string> transforms;
    /// Parameter names with their defaults.
    std::map<std::string, double> defaults;
    bool stochastic = false;
    std::string summary;
};

const std::vector<ModelInfo>& model_catalog();

/// Throws ConfigError for an unknown id.
const ModelInfo& model_info(const std::string& id);

bool transform_compatible(const std::string& model, const std::string& transform);

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Cross-field checks: compatibility, seed presence, time span, state size.
void validate_config(const ExperimentConfig& config);

/// Canonical JSON form. The output directory is left out, so the same
/// experiment written to two places hashes the same.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::string fnv1a_hex(const std::string& bytes);

/// Sets a model parameter, "seed", "time.start", "time.end",
/// "time.output_step", "integrator.<field>" or "initial_state.<i>" by name.
void set_config_value(ExperimentConfig& config, const std::string& name, double value);

}  // namespace nonsmooth
