// Scenario configuration: a sectioned key=value text file whose
// values stay as written, so snapshots round-trip exactly.

#pragma once

#include "nhscat/dynamics.hpp"
#include "nhscat/lattice.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nhscat {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a real number, also accepting [c*]pi[/d] forms such as "pi/2.5" or "-0.5*pi".
double parse_real(std::string_view text);

/// Known scenario names, in CLI order.
const std::vector<std::string>& scenario_names();

class ScenarioConfig {
public:
    using Section = std::map<std::string, std::string>;

    /// Desk-scale defaults for a scenario. Throws ConfigError for unknown names.
    static ScenarioConfig defaults(const std::string& scenario);
    /// INI text. Values are layered over the defaults of the [run] scenario.
    static ScenarioConfig parse(std::string_view text);
    static ScenarioConfig load(const std::filesystem::path& path);

    std::string to_text() const;

    /// key is "section.name".
    void set(const std::string& key, const std::string& value);
    /// "section.name=value"
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double get_real(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::vector<double> get_reals(const std::string& key) const;

    const std::string& scenario() const { return get("run.scenario"); }

    // Typed views; each validates its inputs and throws ConfigError.
    CenterSpec center() const;
    LatticeSpec lattice() const;
    WavePacketSpec packet() const;
    std::vector<double> times() const;
    int frame_every() const;
    std::string out_dir() const { return get("run.out"); }
    double tolerance(const std::string& name) const { return get_real("tolerance." + name); }

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

private:
    std::map<std::string, Section> sections_;
};

}  // namespace nhscat
