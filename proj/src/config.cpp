#include "nhscat/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nhscat {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double plain_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::pair<std::string, std::string> split_key(const std::string& key) {
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
        throw ConfigError("config key '" + key + "' must look like section.name");
    }
    return {key.substr(0, dot), key.substr(dot + 1)};
}

using Defaults = std::map<std::string, ScenarioConfig::Section>;

Defaults common_defaults(const std::string& scenario) {
    return Defaults{
        {"run", {{"scenario", scenario}, {"out", "runs/" + scenario}, {"seed", "2017"}}},
        {"tolerance",
         {{"classify", "1e-9"},
          {"gain_rel", "0.05"},
          {"reflection", "1e-3"},
          {"distortion", "1e-2"},
          {"unitarity", "1e-12"},
          {"residual", "1e-12"},
          {"rotation", "1e-14"},
          {"hermiticity", "1e-12"},
          {"spectrum", "1e-10"},
          {"commutator", "1e-12"},
          {"emission_ratio_rel", "0.02"},
          {"linear_r2", "0.99"},
          {"absorbed_fraction", "0.02"},
          {"absorb_final", "0.05"},
          {"norm", "1e-9"}}},
    };
}

}  // namespace

double parse_real(std::string_view text) {
    std::string s = trim(text);
    if (s.empty()) throw ConfigError("empty numeric value");
    const auto p = s.find("pi");
    if (p == std::string::npos) return plain_number(s);

    double coef = 1.0;
    std::string head = trim(std::string_view(s).substr(0, p));
    if (!head.empty()) {
        if (head == "-") coef = -1.0;
        else if (head == "+") coef = 1.0;
        else {
            if (head.back() != '*') throw ConfigError("bad pi expression: '" + s + "'");
            head.pop_back();
            coef = plain_number(trim(head));
        }
    }
    double div = 1.0;
    std::string tail = trim(std::string_view(s).substr(p + 2));
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError("bad pi expression: '" + s + "'");
        div = plain_number(trim(std::string_view(tail).substr(1)));
        if (div == 0.0) throw ConfigError("division by zero in '" + s + "'");
    }
    return coef * std::numbers::pi / div;
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"sweep", "amplify", "flux-deviation", "singularity", "absorb", "verify"};
    return names;
}

ScenarioConfig ScenarioConfig::defaults(const std::string& scenario) {
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), scenario) == names.end()) {
        throw ConfigError("unknown scenario '" + scenario + "'");
    }
    ScenarioConfig cfg;
    cfg.sections_ = common_defaults(scenario);
    auto& s = cfg.sections_;

    if (scenario == "sweep") {
        s["center"] = {{"type", "dimer"}, {"mu", "0.5"}, {"nu", "2.0"}};
        s["sweep"] = {{"samples", "99"}};
    } else if (scenario == "amplify" || scenario == "flux-deviation") {
        s["center"] = {{"type", "interferometer"}, {"delta", "-1.25"}, {"gamma", "0.75"}, {"phi", "pi/4"}};
        s["lattice"] = {{"left_len", "400"}, {"right_len", "400"}, {"n0", "0"}};
        s["packet"] = {{"n_a", "-60"}, {"k0", "pi/2"}, {"lambda", "0.15"}};
        s["time"] = {{"t_max", "70"}, {"dt", "1"}, {"frame_every", "10"}};
        if (scenario == "flux-deviation") s["flux"] = {{"deviations", "0,5,10"}, {"k0s", "pi/3,pi/2.5,pi/2"}};
    } else if (scenario == "singularity") {
        s["center"] = {{"type", "interferometer"}, {"delta", "0.75"}, {"gamma", "1.25"}, {"phi", "pi/4"}};
        s["lattice"] = {{"left_len", "400"}, {"right_len", "400"}, {"n0", "0"}};
        s["packet"] = {{"n_a", "-60"}, {"k0", "pi/2"}, {"lambda", "0.15"}};
        s["time"] = {{"t_max", "100"}, {"dt", "1"}, {"frame_every", "10"}};
        s["singularity"] = {{"seed_fit_start", "20"}, {"seed_fit_end", "70"},
                            {"packet_fit_start", "50"}, {"packet_fit_end", "100"},
                            {"pair_n_a", "60"}};
    } else if (scenario == "absorb") {
        s["absorb"] = {{"nus", "0.5,0.4,0.1"}, {"n0", "20"}};
        s["lattice"] = {{"right_len", "440"}};
        s["time"] = {{"t_max", "200"}, {"dt", "1"}, {"frame_every", "10"}};
    } else if (scenario == "verify") {
        s["lattice"] = {{"left_len", "100"}, {"right_len", "100"}, {"n0", "0"}};
        s["verify"] = {{"residual_sites", "100"}, {"random_dimers", "20"}, {"random_potentials", "10"}};
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::parse(std::string_view text) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    const auto scenario = tree.get_optional<std::string>("run.scenario");
    if (!scenario) throw ConfigError("config is missing [run] scenario");
    ScenarioConfig cfg = defaults(trim(*scenario));
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("top-level key '" + section + "' outside any section");
        for (const auto& [key, value] : body) cfg.sections_[section][key] = trim(value.data());
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ScenarioConfig::to_text() const {
    pt::ptree tree;
    for (const auto& [section, body] : sections_) {
        pt::ptree& node = tree.put_child(section, pt::ptree{});
        for (const auto& [key, value] : body) node.put(key, value);
    }
    std::ostringstream out;
    pt::write_ini(out, tree);
    return out.str();
}

void ScenarioConfig::set(const std::string& key, const std::string& value) {
    auto [section, name] = split_key(key);
    if (section == "run" && name == "scenario" && value != scenario()) {
        throw ConfigError("run.scenario cannot be overridden");
    }
    sections_[section][name] = trim(value);
}

void ScenarioConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must be key=value");
    set(trim(std::string_view(assignment).substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

bool ScenarioConfig::has(const std::string& key) const {
    auto [section, name] = split_key(key);
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(name);
}

const std::string& ScenarioConfig::get(const std::string& key) const {
    auto [section, name] = split_key(key);
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(name)) throw ConfigError("missing config key " + key);
    return it->second.at(name);
}

double ScenarioConfig::get_real(const std::string& key) const {
    try {
        const double v = parse_real(get(key));
        if (!std::isfinite(v)) throw ConfigError("non-finite value");
        return v;
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

int ScenarioConfig::get_int(const std::string& key) const {
    const double v = get_real(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer");
    return static_cast<int>(v);
}

std::vector<double> ScenarioConfig::get_reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(parse_real(item));
        } catch (const ConfigError& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

CenterSpec ScenarioConfig::center() const {
    const std::string& type = get("center.type");
    CenterSpec c;
    if (type == "onsite") {
        const double re = has("center.V_re") ? get_real("center.V_re") : 0.0;
        const double im = has("center.V_im") ? get_real("center.V_im") : 0.0;
        c = OnSitePotential{cplx(re, im)};
    } else if (type == "interferometer") {
        c = Interferometer{get_real("center.delta"), get_real("center.gamma"), get_real("center.phi")};
    } else if (type == "dimer") {
        c = AsymmetricDimer{get_real("center.mu"), get_real("center.nu")};
    } else {
        throw ConfigError("center.type must be onsite, interferometer or dimer (got '" + type + "')");
    }
    try {
        validate(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

LatticeSpec ScenarioConfig::lattice() const {
    LatticeSpec l{get_int("lattice.left_len"), get_int("lattice.right_len")};
    const int n0 = has("lattice.n0") ? get_int("lattice.n0") : 0;
    if (n0 > 0) {
        l.left_boundary = LeftBoundary::HardWall;
        l.n0 = n0;
    }
    try {
        l.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return l;
}

WavePacketSpec ScenarioConfig::packet() const {
    const int n_a = get_int("packet.n_a");
    const double k0 = get_real("packet.k0");
    if (has("packet.w")) return WavePacketSpec::from_half_width(n_a, k0, get_real("packet.w"));
    const double lambda = get_real("packet.lambda");
    if (!(lambda > 0.0)) throw ConfigError("packet.lambda must be positive");
    return WavePacketSpec{n_a, k0, lambda};
}

std::vector<double> ScenarioConfig::times() const {
    const double t_max = get_real("time.t_max"), dt = get_real("time.dt");
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw ConfigError("time grid needs dt > 0 and t_max >= 0");
    return time_grid(t_max, dt);
}

int ScenarioConfig::frame_every() const {
    const int k = has("time.frame_every") ? get_int("time.frame_every") : 1;
    if (k <= 0) throw ConfigError("time.frame_every must be positive");
    return k;
}

}  // namespace nhscat
