#pragma once

// The acceptance suite: ten numbered criteria, each made of one or more
// measured checks against pinned thresholds. Failures are collected, never
// thrown, so a report always covers every criterion.

#include "nonsmooth/integrators.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace nonsmooth {

struct Check {
    int criterion = 0;
    std::string name;
    double measured = 0.0;
    /// "<=", ">=", "==" or "in" (closed interval [threshold, upper]).
    std::string relation = "<=";
    double threshold = 0.0;
    double upper = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationOptions {
    IntegratorConfig integrator;
    std::uint64_t seed = 20240611;
};

struct ValidationReport {
    std::vector<Check> checks;
    nlohmann::json fingerprint;

    bool passed() const;
    bool criterion_passed(int criterion) const;
    nlohmann::json to_json() const;
    /// Human-readable table, one row per check.
    std::string table() const;
};

/// Titles of the ten criteria, index 0 is criterion 1.
const std::vector<std::string>& criterion_titles();

ValidationReport run_validation(const ValidationOptions& options);

/// Library version string.
const char* library_version();

}  // namespace nonsmooth
