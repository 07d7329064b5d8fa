// Named, reproducible scenarios with built-in assertions.
//
// Each run_* function validates its configuration before allocating any matrix,
// computes its tables and returns them in memory; execute() writes them into a
// run directory together with metrics.txt and manifest.txt.

#pragma once

#include "nhscat/config.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nhscat {

struct Assertion {
    std::string name;
    double measured{0.0};
    std::string relation;  // "<", ">", "<=", "==", "true"
    double threshold{0.0};
    bool passed{false};
};

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunReport {
    std::string scenario;
    std::vector<Assertion> assertions;
    std::map<std::string, std::string> metrics;
    std::vector<OutputFile> files;

    bool passed() const;
    const Assertion* find(const std::string& name) const;
    const OutputFile* file(const std::string& name) const;
};

struct RunManifest {
    std::string config_snapshot;
    std::string version;
    double duration_s{0.0};
    std::vector<std::string> outputs;
    std::vector<Assertion> assertions;
    std::string error;  // set when the run aborted (validation, boundary contamination, ...)
    bool invalid_config{false};  // the abort came from a ConfigError

    bool passed() const;
    std::string to_text() const;
};

RunReport run_sweep(const ScenarioConfig& cfg);
RunReport run_amplify(const ScenarioConfig& cfg);
RunReport run_flux_deviation(const ScenarioConfig& cfg);
RunReport run_singularity(const ScenarioConfig& cfg);
RunReport run_absorb(const ScenarioConfig& cfg);
RunReport run_verify(const ScenarioConfig& cfg);

/// Dispatch on cfg.scenario().
RunReport run_scenario(const ScenarioConfig& cfg);

/// Runs the scenario and writes every output, metrics.txt and manifest.txt into
/// out_dir (created if needed). A run that throws still writes its manifest,
/// with `error` set and passed() false.
RunManifest execute(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

const char* code_version();

}  // namespace nhscat
