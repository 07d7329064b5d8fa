// nhscat: run one scenario and write its outputs into a run directory.
//
//   nhscat <scenario> [--config FILE] [--out DIR] [--set section.key=value]...
//
// Exit status: 0 all assertions passed, 1 an assertion failed or the run aborted,
// 2 usage or configuration error.

#include "nhscat/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Options {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
};

nhscat::ScenarioConfig assemble(const std::string& scenario, const Options& opt) {
    nhscat::ScenarioConfig cfg = nhscat::ScenarioConfig::defaults(scenario);
    if (!opt.config.empty()) {
        cfg = nhscat::ScenarioConfig::load(opt.config);
        if (cfg.scenario() != scenario) {
            throw nhscat::ConfigError("config file is for scenario '" + cfg.scenario() + "', not '" + scenario + "'");
        }
    }
    for (const auto& o : opt.overrides) cfg.apply_override(o);
    if (!opt.out.empty()) cfg.set("run.out", opt.out);
    return cfg;
}

void print_summary(const std::string& scenario, const std::string& out, const nhscat::RunManifest& m) {
    std::cout << scenario << ": " << (m.passed() ? "PASS" : "FAIL") << " (" << m.duration_s << " s) -> " << out << '\n';
    if (!m.error.empty()) std::cout << "  error: " << m.error << '\n';
    for (const auto& a : m.assertions) {
        std::cout << "  [" << (a.passed ? "pass" : "FAIL") << "] " << a.name << ": " << a.measured << ' ' << a.relation
                  << ' ' << a.threshold << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering on non-Hermitian tight-binding lattices"};
    app.set_version_flag("--version", std::string(nhscat::code_version()));
    app.require_subcommand(1);

    std::map<std::string, Options> options;
    for (const auto& name : nhscat::scenario_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
        Options& opt = options[name];
        sub->add_option("--config", opt.config, "INI file (section.key layout)")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "run directory (default runs/<scenario>)");
        sub->add_option("--set", opt.overrides, "override, e.g. --set center.gamma=0.5")->take_all();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string scenario = app.get_subcommands().front()->get_name();
    nhscat::ScenarioConfig cfg;
    try {
        cfg = assemble(scenario, options[scenario]);
    } catch (const nhscat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    const std::string out = cfg.out_dir();
    nhscat::RunManifest manifest;
    try {
        manifest = nhscat::execute(cfg, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    print_summary(scenario, out, manifest);
    if (manifest.invalid_config) return 2;
    return manifest.passed() ? 0 : 1;
}
