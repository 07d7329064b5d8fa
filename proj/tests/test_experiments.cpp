// Scenario runs on reduced lattices, so the whole file stays fast.
#include "nhscat/experiments.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nhscat;

namespace {

ScenarioConfig small(const std::string& scenario) {
    ScenarioConfig cfg = ScenarioConfig::defaults(scenario);
    if (cfg.has("lattice.left_len")) {
        cfg.set("lattice.left_len", "160");
        cfg.set("lattice.right_len", "160");
    }
    if (cfg.has("packet.n_a")) cfg.set("packet.n_a", "-50");
    if (cfg.has("time.t_max")) {
        cfg.set("time.t_max", "60");
        cfg.set("time.dt", "2");
    }
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void require_all_pass(const RunReport& rep) {
    for (const auto& a : rep.assertions) {
        INFO(a.name << " measured " << a.measured << ' ' << a.relation << ' ' << a.threshold);
        CHECK(a.passed);
    }
    CHECK(rep.passed());
}

}  // namespace

TEST_CASE("sweep") {
    const RunReport rep = run_sweep(ScenarioConfig::defaults("sweep"));
    require_all_pass(rep);
    REQUIRE(rep.file("sweep_left.csv"));
    REQUIRE(rep.file("sweep_right.csv"));
    CHECK(rep.find("resonant_r_vanishes"));

    ScenarioConfig gain = ScenarioConfig::defaults("sweep");
    gain.apply_override("center.type=onsite");
    gain.apply_override("center.V_im=2");
    const RunReport g = run_sweep(gain);
    require_all_pass(g);
    CHECK(g.metrics.at("half_pi_divergent") == "true");
    CHECK(g.file("sweep_left.csv")->content.find("inf") != std::string::npos);

    ScenarioConfig herm = ScenarioConfig::defaults("sweep");
    herm.apply_override("center.type=interferometer");
    herm.apply_override("center.delta=0.4");
    herm.apply_override("center.gamma=0");
    herm.apply_override("center.phi=pi/4");
    const RunReport h = run_sweep(herm);
    require_all_pass(h);
    CHECK(h.find("hermitian_T_plus_R_is_1"));

    herm.apply_override("center.phi=0.3");
    CHECK_THROWS_AS(run_sweep(herm), ConfigError);
}

TEST_CASE("amplify on a reduced lattice") {
    const RunReport rep = run_amplify(small("amplify"));
    require_all_pass(rep);
    CHECK(std::stod(rep.metrics.at("gain")) == doctest::Approx(4.0).epsilon(1e-3));
    REQUIRE(rep.file("frames.csv"));
    CHECK(rep.file("frames.csv")->content.rfind("t,j,p\n", 0) == 0);

    ScenarioConfig dimer = small("amplify");
    dimer.apply_override("center.type=dimer");
    dimer.apply_override("center.mu=0.25");
    dimer.apply_override("center.nu=4");
    const RunReport d = run_amplify(dimer);
    require_all_pass(d);
    CHECK(std::stod(d.metrics.at("gain")) == doctest::Approx(16.0).epsilon(1e-3));
}

TEST_CASE("amplify rejects inconsistent configurations") {
    ScenarioConfig off = small("amplify");
    off.apply_override("center.gamma=0.5");
    CHECK_THROWS_AS(run_amplify(off), ConfigError);

    ScenarioConfig onsite = small("amplify");
    onsite.apply_override("center.type=onsite");
    CHECK_THROWS_AS(run_amplify(onsite), ConfigError);

    // a lattice too short for the transit trips the boundary check
    ScenarioConfig tight = small("amplify");
    tight.apply_override("lattice.right_len=60");
    CHECK_THROWS_AS(run_amplify(tight), BoundaryContamination);
}

TEST_CASE("flux deviation on a reduced lattice") {
    ScenarioConfig cfg = small("flux-deviation");
    cfg.apply_override("flux.deviations=0,10");
    cfg.apply_override("flux.k0s=pi/3,pi/2");
    const RunReport rep = run_flux_deviation(cfg);
    require_all_pass(rep);
    const std::string table = rep.file("flux_deviation.csv")->content;
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    CHECK(rep.find("dev=10:k0_nearest_half_pi_least_distorted"));

    cfg.apply_override("flux.k0s=0,pi/2");
    CHECK_THROWS_AS(run_flux_deviation(cfg), ConfigError);
}

TEST_CASE("singularity on a reduced lattice") {
    ScenarioConfig cfg = small("singularity");
    cfg.apply_override("singularity.seed_fit_start=10");
    cfg.apply_override("singularity.seed_fit_end=40");
    cfg.apply_override("singularity.packet_fit_start=40");
    cfg.apply_override("singularity.packet_fit_end=60");
    cfg.apply_override("singularity.pair_n_a=50");
    const RunReport rep = run_singularity(cfg);
    require_all_pass(rep);
    CHECK(std::stod(rep.metrics.at("seed_plus.emission_ratio")) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rep.file("series.csv"));
    CHECK(rep.file("frames_pair.csv"));

    ScenarioConfig dimer = cfg;
    dimer.apply_override("center.type=dimer");
    dimer.apply_override("center.mu=-2");
    dimer.apply_override("center.nu=0.5");
    const RunReport d = run_singularity(dimer);
    require_all_pass(d);
    CHECK(std::stod(d.metrics.at("pair.P_final")) == doctest::Approx(std::stod(rep.metrics.at("pair.P_final"))).epsilon(1e-8));

    cfg.apply_override("center.gamma=0.5");
    CHECK_THROWS_AS(run_singularity(cfg), ConfigError);
    ScenarioConfig window = small("singularity");
    window.apply_override("singularity.seed_fit_start=200");
    window.apply_override("singularity.seed_fit_end=300");
    CHECK_THROWS_AS(run_singularity(window), ConfigError);
}

TEST_CASE("absorb on a reduced lattice") {
    ScenarioConfig cfg = ScenarioConfig::defaults("absorb");
    cfg.apply_override("absorb.n0=10");
    cfg.apply_override("absorb.nus=0.5,0.1");
    cfg.apply_override("lattice.right_len=200");
    cfg.apply_override("time.t_max=80");
    cfg.apply_override("time.dt=2");
    const RunReport rep = run_absorb(cfg);
    require_all_pass(rep);
    REQUIRE(rep.file("absorb.csv"));
    CHECK(rep.file("absorb.csv")->content.rfind("t,P_nu_0.5,P_nu_0.1,P_control\n", 0) == 0);

    cfg.apply_override("absorb.nus=0.5,-0.1");
    CHECK_THROWS_AS(run_absorb(cfg), ConfigError);
}

TEST_CASE("verify") {
    ScenarioConfig cfg = ScenarioConfig::defaults("verify");
    cfg.apply_override("lattice.left_len=30");
    cfg.apply_override("lattice.right_len=30");
    const RunReport rep = run_verify(cfg);
    require_all_pass(rep);
    CHECK(rep.assertions.size() > 25);
    CHECK(rep.find("parity_commutator"));

    // an impossible tolerance shows up as a failed entry, not an exception
    cfg.apply_override("tolerance.rotation=0");
    const RunReport strict = run_verify(cfg);
    CHECK_FALSE(strict.passed());
}

TEST_CASE("execute writes a manifest, also on failure") {
    const auto dir = std::filesystem::temp_directory_path() / "nhscat_exec_test";
    std::filesystem::remove_all(dir);

    const RunManifest ok = execute(ScenarioConfig::defaults("sweep"), dir / "ok");
    CHECK(ok.passed());
    CHECK(std::filesystem::exists(dir / "ok" / "manifest.txt"));
    CHECK(std::filesystem::exists(dir / "ok" / "metrics.txt"));
    CHECK(std::filesystem::exists(dir / "ok" / "sweep_left.csv"));
    const std::string manifest = slurp(dir / "ok" / "manifest.txt");
    CHECK(manifest.find("passed = true") != std::string::npos);
    CHECK(manifest.find(std::string("version = ") + code_version()) != std::string::npos);
    CHECK(manifest.find("[config snapshot]") != std::string::npos);

    // determinism: the same config gives byte-identical tables
    execute(ScenarioConfig::defaults("sweep"), dir / "again");
    CHECK(slurp(dir / "ok" / "sweep_left.csv") == slurp(dir / "again" / "sweep_left.csv"));

    ScenarioConfig bad = small("amplify");
    bad.apply_override("center.gamma=0.1");
    const RunManifest failed = execute(bad, dir / "bad");
    CHECK_FALSE(failed.passed());
    CHECK(failed.invalid_config);
    CHECK(slurp(dir / "bad" / "manifest.txt").find("passed = false") != std::string::npos);

    ScenarioConfig strict = ScenarioConfig::defaults("sweep");
    strict.apply_override("center.mu=0.6");
    strict.apply_override("center.nu=0.6");
    strict.apply_override("tolerance.unitarity=0");
    const RunManifest red = execute(strict, dir / "red");
    CHECK_FALSE(red.passed());
    CHECK_FALSE(red.invalid_config);
    CHECK(red.error.empty());

    std::filesystem::remove_all(dir);
}
