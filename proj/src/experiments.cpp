#include "nhscat/experiments.hpp"

#include "nhscat/analytic.hpp"
#include "nhscat/dynamics.hpp"
#include "nhscat/transforms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace nhscat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFluxUnit = kPi / 100.0;

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string short_num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

Assertion check(std::string name, double measured, std::string relation, double threshold) {
    bool ok = false;
    if (relation == "<") ok = measured < threshold;
    else if (relation == "<=") ok = measured <= threshold;
    else if (relation == ">") ok = measured > threshold;
    else if (relation == ">=") ok = measured >= threshold;
    else if (relation == "==") ok = measured == threshold;
    else if (relation == "true") ok = measured != 0.0;
    return Assertion{std::move(name), measured, std::move(relation), threshold, ok};
}

Assertion check_true(std::string name, bool value) { return check(std::move(name), value ? 1.0 : 0.0, "true", 1.0); }

// Frames 0, every, 2*every, ... plus the last one.
std::vector<ProfileFrame> subsample(const std::vector<ProfileFrame>& frames, int every) {
    std::vector<ProfileFrame> out;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i % static_cast<std::size_t>(every) == 0 || i + 1 == frames.size()) out.push_back(frames[i]);
    }
    return out;
}

std::string frames_csv(const std::vector<ProfileFrame>& frames, const SiteIndex& sites, int every) {
    std::ostringstream os;
    write_frames_csv(os, subsample(frames, every), sites);
    return os.str();
}

/// mu, nu of a center that reduces to a dimer (interferometer at any phi uses
/// its pi/4 reduction parameters).
DimerParams reducible_params(const CenterSpec& c, const char* scenario) {
    if (auto* d = std::get_if<AsymmetricDimer>(&c)) return {d->mu, d->nu};
    if (auto* i = std::get_if<Interferometer>(&c)) return dimer_from_interferometer(i->delta, i->gamma);
    throw ConfigError(std::string(scenario) + ": center must be an interferometer or a dimer");
}

CenterSpec uniform_reference(const CenterSpec& c) {
    switch (center_kind(c)) {
        case CenterKind::Single: return OnSitePotential{0.0};
        case CenterKind::PlusMinus: return Interferometer{-1.0, 0.0, kPi / 4.0};
        case CenterKind::AlphaBeta: return AsymmetricDimer{1.0, 1.0};
    }
    return AsymmetricDimer{1.0, 1.0};
}

bool is_hermitian_center(const CenterSpec& c) {
    if (auto* o = std::get_if<OnSitePotential>(&c)) return o->V.imag() == 0.0;
    if (auto* i = std::get_if<Interferometer>(&c)) return i->gamma == 0.0;
    const auto& d = std::get<AsymmetricDimer>(c);
    return d.mu == d.nu;
}

std::vector<ProfileFrame> run_packet(const HamiltonianMatrix& H, const StateVector& psi0, const std::vector<double>& times) {
    return profiles(evolve_state(H, psi0, times), times);
}

std::vector<double> totals(const std::vector<ProfileFrame>& frames) {
    std::vector<double> v;
    for (const auto& f : frames) v.push_back(f.total);
    return v;
}

struct Window {
    std::vector<double> t;
    std::vector<std::vector<double>> series;
};

// Points of `times` inside [a, b] for each series.
Window window(const std::vector<double>& times, const std::vector<std::vector<double>>& series, double a, double b) {
    Window w;
    w.series.resize(series.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < a || times[i] > b) continue;
        w.t.push_back(times[i]);
        for (std::size_t s = 0; s < series.size(); ++s) w.series[s].push_back(series[s][i]);
    }
    if (w.t.size() < 3) throw ConfigError("fit window [" + num(a) + ", " + num(b) + "] has fewer than 3 time points");
    return w;
}

}  // namespace

// -------------------------------- reporting ---------------------------------

bool RunReport::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

const Assertion* RunReport::find(const std::string& name) const {
    for (const auto& a : assertions) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

const OutputFile* RunReport::file(const std::string& name) const {
    for (const auto& f : files) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

bool RunManifest::passed() const {
    return error.empty() && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::string RunManifest::to_text() const {
    std::ostringstream os;
    os << "version = " << version << '\n';
    os << "duration_s = " << std::fixed << std::setprecision(3) << duration_s << std::defaultfloat << '\n';
    os << "outputs = ";
    for (std::size_t i = 0; i < outputs.size(); ++i) os << (i ? "," : "") << outputs[i];
    os << '\n';
    os << "passed = " << (passed() ? "true" : "false") << '\n';
    if (!error.empty()) os << "error = " << error << '\n';
    os << "\n[assertions]\n";
    for (const auto& a : assertions) {
        os << a.name << ": measured=" << num(a.measured) << ' ' << a.relation << ' ' << num(a.threshold) << ' '
           << (a.passed ? "PASS" : "FAIL") << '\n';
    }
    os << "\n[config snapshot]\n" << config_snapshot;
    return os.str();
}

const char* code_version() { return NHSCAT_VERSION; }

// ---------------------------------- sweep -----------------------------------

RunReport run_sweep(const ScenarioConfig& cfg) {
    const CenterSpec center = cfg.center();
    const int samples = cfg.get_int("sweep.samples");
    if (samples <= 0) throw ConfigError("sweep.samples must be positive");
    if (auto* i = std::get_if<Interferometer>(&center); i && std::abs(i->phi - kPi / 4.0) > 1e-12) {
        throw ConfigError("sweep: interferometer amplitudes are closed-form only at phi = pi/4");
    }

    const auto rows = sweep(center, samples);
    RunReport rep{"sweep", {}, {}, {}};
    for (Incidence inc : {Incidence::Left, Incidence::Right}) {
        std::ostringstream os;
        write_sweep_csv(os, rows, inc);
        rep.files.push_back({inc == Incidence::Left ? "sweep_left.csv" : "sweep_right.csv", os.str()});
    }

    int divergent = 0;
    double unitarity = 0.0, max_r = 0.0;
    for (const auto& row : rows) {
        for (const auto* a : {&row.left, &row.right}) {
            if (a->divergent) {
                ++divergent;
                continue;
            }
            unitarity = std::max(unitarity, std::abs(a->T + a->R - 1.0));
            max_r = std::max(max_r, std::abs(a->r));
        }
    }
    rep.metrics["center"] = center_name(center);
    rep.metrics["samples"] = std::to_string(samples);
    rep.metrics["divergent_entries"] = std::to_string(divergent);
    rep.metrics["max_abs_r"] = num(max_r);
    rep.metrics["max_unitarity_defect"] = num(unitarity);

    if (is_hermitian_center(center)) {
        rep.assertions.push_back(check("hermitian_T_plus_R_is_1", unitarity, "<", cfg.tolerance("unitarity")));
    }
    if (center_kind(center) != CenterKind::Single) {
        const DimerParams p = reducible_params(center, "sweep");
        if (p.is_resonant(cfg.tolerance("classify"))) {
            rep.assertions.push_back(check("resonant_r_vanishes", max_r, "<", 1e-14));
        }
    }
    if (samples % 2 == 1) {
        const auto& mid = rows[static_cast<std::size_t>(samples / 2)];
        const bool expected = amplitudes_for(center, kPi / 2.0, Incidence::Left).divergent;
        rep.metrics["half_pi_divergent"] = mid.left.divergent ? "true" : "false";
        rep.assertions.push_back(check_true("half_pi_pole_flag_matches", mid.left.divergent == expected));
    }
    return rep;
}

// --------------------------------- amplify ----------------------------------

RunReport run_amplify(const ScenarioConfig& cfg) {
    const CenterSpec center = cfg.center();
    const DimerParams p = reducible_params(center, "amplify");
    if (!p.is_resonant(cfg.tolerance("classify"))) {
        throw ConfigError("amplify requires the resonance mu*nu = 1 (got " + num(p.product()) + ")");
    }
    const LatticeSpec lattice = cfg.lattice();
    const WavePacketSpec packet = cfg.packet();
    const std::vector<double> times = cfg.times();
    const SiteIndex sites(lattice, center_kind(center));
    const StateVector psi0 = gaussian_packet(sites, packet);

    const auto frames = run_packet(build_hamiltonian(center, lattice), psi0, times);
    const auto ref_frames = run_packet(build_hamiltonian(uniform_reference(center), lattice), psi0, times);
    const TransitMetrics m = transit_metrics(frames, sites, ref_frames);
    const TransitMetrics ref = transit_metrics(ref_frames, sites);

    RunReport rep{"amplify", {}, {}, {}};
    const double expected = p.nu * p.nu;
    rep.metrics["expected_gain"] = num(expected);
    rep.metrics["gain"] = num(m.gain);
    rep.metrics["reflected"] = num(m.reflected / m.incident);
    rep.metrics["transmitted"] = num(m.transmitted);
    rep.metrics["distortion"] = num(m.distortion);
    rep.metrics["distortion_shift"] = std::to_string(m.best_shift);
    rep.metrics["distortion_scale"] = num(m.best_scale);
    rep.metrics["boundary_leak"] = num(m.boundary_leak);
    rep.metrics["reference_gain"] = num(ref.gain);
    rep.metrics["packet_lambda"] = num(packet.lambda);
    rep.metrics["packet_half_width"] = num(packet.half_width());

    rep.assertions.push_back(check("gain_matches_nu_squared", std::abs(m.gain - expected) / expected, "<",
                                   cfg.tolerance("gain_rel")));
    rep.assertions.push_back(check("reflected_norm", m.reflected / m.incident, "<", cfg.tolerance("reflection")));
    rep.assertions.push_back(check("distortion", m.distortion, "<", cfg.tolerance("distortion")));

    const int every = cfg.frame_every();
    rep.files.push_back({"frames.csv", frames_csv(frames, sites, every)});
    rep.files.push_back({"reference_frames.csv", frames_csv(ref_frames, sites, every)});
    return rep;
}

// ------------------------------ flux deviation ------------------------------

RunReport run_flux_deviation(const ScenarioConfig& cfg) {
    const CenterSpec center = cfg.center();
    const auto* base = std::get_if<Interferometer>(&center);
    if (!base) throw ConfigError("flux-deviation needs an interferometer center");
    const DimerParams p = dimer_from_interferometer(base->delta, base->gamma);
    if (!p.is_resonant(cfg.tolerance("classify"))) {
        throw ConfigError("flux-deviation requires delta^2 - gamma^2 = 1 (got " + num(p.product()) + ")");
    }
    const LatticeSpec lattice = cfg.lattice();
    const WavePacketSpec packet = cfg.packet();
    const std::vector<double> times = cfg.times();
    const std::vector<double> deviations = cfg.get_reals("flux.deviations");
    const std::vector<double> k0s = cfg.get_reals("flux.k0s");
    for (double k0 : k0s) {
        if (!(k0 > 0.0 && k0 < kPi)) throw ConfigError("flux.k0s entries must lie in (0, pi)");
    }
    const SiteIndex sites(lattice, CenterKind::PlusMinus);
    for (double k0 : k0s) gaussian_packet(sites, {packet.center, k0, packet.lambda});  // placement check only

    struct Row {
        double k0, dev, gain, reflected, distortion;
    };
    std::vector<Row> rows;
    const HamiltonianMatrix ref_H = build_hamiltonian(uniform_reference(center), lattice);
    for (double k0 : k0s) {
        const StateVector psi0 = gaussian_packet(sites, {packet.center, k0, packet.lambda});
        const auto ref_frames = run_packet(ref_H, psi0, times);
        for (double dev : deviations) {
            Interferometer c = *base;
            c.phi = kPi / 4.0 + dev * kFluxUnit;
            const auto frames = run_packet(build_hamiltonian(c, lattice), psi0, times);
            const TransitMetrics m = transit_metrics(frames, sites, ref_frames);
            rows.push_back({k0, dev, m.gain, m.reflected / m.incident, m.distortion});
        }
    }

    RunReport rep{"flux-deviation", {}, {}, {}};
    std::ostringstream table;
    table << "k0,deviation,phi,gain,reflected,distortion\n" << std::setprecision(17);
    for (const auto& r : rows) {
        table << r.k0 << ',' << r.dev << ',' << kPi / 4.0 + r.dev * kFluxUnit << ',' << r.gain << ',' << r.reflected
              << ',' << r.distortion << '\n';
        rep.metrics["distortion[k0=" + short_num(r.k0) + ",dev=" + short_num(r.dev) + "]"] = num(r.distortion);
        rep.metrics["gain[k0=" + short_num(r.k0) + ",dev=" + short_num(r.dev) + "]"] = num(r.gain);
    }
    rep.files.push_back({"flux_deviation.csv", table.str()});

    auto distortion = [&](double k0, double dev) {
        for (const auto& r : rows) {
            if (r.k0 == k0 && r.dev == dev) return r.distortion;
        }
        return -1.0;
    };
    const bool has_zero = std::find(deviations.begin(), deviations.end(), 0.0) != deviations.end();
    for (double k0 : k0s) {
        if (!has_zero) break;
        const double d0 = distortion(k0, 0.0);
        rep.assertions.push_back(check("k0=" + short_num(k0) + ":undeviated_distortion", d0, "<", cfg.tolerance("distortion")));
        double others = std::numeric_limits<double>::infinity();
        for (double dev : deviations) {
            if (dev != 0.0) others = std::min(others, distortion(k0, dev));
        }
        if (std::isfinite(others)) {
            rep.assertions.push_back(check("k0=" + short_num(k0) + ":minimal_at_zero_deviation", d0, "<", others));
        }
    }
    if (k0s.size() > 1) {
        const double k_best = *std::min_element(k0s.begin(), k0s.end(), [](double a, double b) {
            return std::abs(a - kPi / 2.0) < std::abs(b - kPi / 2.0);
        });
        for (double dev : deviations) {
            if (dev == 0.0) continue;
            double others = std::numeric_limits<double>::infinity();
            for (double k0 : k0s) {
                if (k0 != k_best) others = std::min(others, distortion(k0, dev));
            }
            rep.assertions.push_back(
                check("dev=" + short_num(dev) + ":k0_nearest_half_pi_least_distorted", distortion(k_best, dev), "<", others));
        }
    }
    return rep;
}

// -------------------------------- singularity -------------------------------

RunReport run_singularity(const ScenarioConfig& cfg) {
    const CenterSpec center = cfg.center();
    const DimerParams p = reducible_params(center, "singularity");
    if (!p.is_singular(cfg.tolerance("classify"))) {
        throw ConfigError("singularity requires mu*nu = -1 (got " + num(p.product()) + ")");
    }
    if (auto* i = std::get_if<Interferometer>(&center); i && std::abs(i->phi - kPi / 4.0) > 1e-12) {
        throw ConfigError("singularity: the interferometer must sit at phi = pi/4");
    }
    const LatticeSpec lattice = cfg.lattice();
    const WavePacketSpec packet = cfg.packet();
    const std::vector<double> times = cfg.times();
    const double seed_a = cfg.get_real("singularity.seed_fit_start"), seed_b = cfg.get_real("singularity.seed_fit_end");
    const double pk_a = cfg.get_real("singularity.packet_fit_start"), pk_b = cfg.get_real("singularity.packet_fit_end");
    const double transient = cfg.has("singularity.transient") ? cfg.get_real("singularity.transient") : 5.0;
    const int pair_n_a = cfg.get_int("singularity.pair_n_a");

    const SiteIndex dimer_sites(lattice, CenterKind::AlphaBeta);
    const bool interferometer = center_kind(center) == CenterKind::PlusMinus;
    auto lift = [&](StateVector s) { return interferometer ? to_interferometer_basis(s) : s; };

    const StateVector seed_plus = lift(seed_state(dimer_sites, p, Branch::Plus));
    const StateVector seed_minus = lift(seed_state(dimer_sites, p, Branch::Minus));
    const StateVector single = lift(gaussian_packet(dimer_sites, packet));
    const TwoPacketState pair = antisym_two_packets(dimer_sites, pair_n_a, packet.k0, packet.lambda, p.nu);
    const StateVector pair_state = lift(pair.state);
    window(times, {}, seed_a, seed_b);
    window(times, {}, pk_a, pk_b);

    const HamiltonianMatrix H = build_hamiltonian(center, lattice);
    const SiteIndex sites = H.sites();
    const auto f_plus = run_packet(H, seed_plus, times);
    const auto f_minus = run_packet(H, seed_minus, times);
    const auto f_single = run_packet(H, single, times);
    const auto f_pair = run_packet(H, pair_state, times);
    for (const auto* f : {&f_plus, &f_minus, &f_single, &f_pair}) transit_metrics(*f, sites);

    auto side = [&](const std::vector<ProfileFrame>& frames, bool right) {
        std::vector<double> v;
        for (const auto& f : frames) {
            const LeadNorms n = lead_norms(f, sites);
            v.push_back(right ? n.right : n.left);
        }
        return v;
    };

    RunReport rep{"singularity", {}, {}, {}};
    const double tol_r2 = cfg.tolerance("linear_r2");

    // (a) seed |alpha> + i nu |beta>: persistent two-sided emission
    {
        const auto P = totals(f_plus);
        const Window w = window(times, {P, side(f_plus, false), side(f_plus, true)}, seed_a, seed_b);
        const LineFit total = fit_line(w.t, w.series[0]);
        const LineFit left = fit_line(w.t, w.series[1]);
        const LineFit right = fit_line(w.t, w.series[2]);
        const double ratio = (left.slope > 0.0 && right.slope > 0.0) ? std::sqrt(right.slope / left.slope) : 0.0;
        rep.metrics["seed_plus.P_slope"] = num(total.slope);
        rep.metrics["seed_plus.P_r2"] = num(total.r2);
        rep.metrics["seed_plus.emission_ratio"] = num(ratio);
        rep.metrics["seed_plus.P_final"] = num(P.back());
        rep.assertions.push_back(check("seed_plus:linear_growth_r2", total.r2, ">", tol_r2));
        rep.assertions.push_back(check("seed_plus:P_grows", total.slope, ">", 0.0));
        rep.assertions.push_back(check("seed_plus:emission_ratio_is_nu", std::abs(ratio / std::abs(p.nu) - 1.0), "<",
                                       cfg.tolerance("emission_ratio_rel")));
    }
    // (b) seed |alpha> - i nu |beta>: short-lived
    {
        const auto P = totals(f_minus);
        double peak = 0.0, rise = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i) {
            peak = std::max(peak, P[i]);
            if (i && times[i - 1] >= transient) rise = std::max(rise, P[i] - P[i - 1]);
        }
        rep.metrics["seed_minus.P_peak"] = num(peak);
        rep.metrics["seed_minus.P_final"] = num(P.back());
        rep.assertions.push_back(check("seed_minus:bounded_by_initial", peak / P.front(), "<=", 1.0 + 1e-9));
        rep.assertions.push_back(check("seed_minus:non_increasing_after_transient", rise / P.front(), "<=", 1e-9));
        rep.assertions.push_back(check("seed_minus:decayed", P.back() / P.front(), "<", 1.0));
    }
    // (c) single Gaussian packet: reflected and transmitted norms grow linearly
    {
        const Window w = window(times, {side(f_single, false), side(f_single, true)}, pk_a, pk_b);
        const LineFit refl = fit_line(w.t, w.series[0]);
        const LineFit trans = fit_line(w.t, w.series[1]);
        rep.metrics["packet.reflected_slope"] = num(refl.slope);
        rep.metrics["packet.transmitted_slope"] = num(trans.slope);
        rep.metrics["packet.reflected_r2"] = num(refl.r2);
        rep.metrics["packet.transmitted_r2"] = num(trans.r2);
        rep.assertions.push_back(check("packet:reflected_linear_r2", refl.r2, ">", tol_r2));
        rep.assertions.push_back(check("packet:transmitted_linear_r2", trans.r2, ">", tol_r2));
        rep.assertions.push_back(check("packet:reflected_grows", refl.slope, ">", 0.0));
        rep.assertions.push_back(check("packet:transmitted_grows", trans.slope, ">", 0.0));
    }
    // (d) anti-symmetric pair: coherent perfect absorption
    {
        const auto P = totals(f_pair);
        rep.metrics["pair.P_initial"] = num(P.front());
        rep.metrics["pair.P_final"] = num(P.back());
        rep.metrics["pair.center_overlap"] = num(pair.center_overlap);
        rep.assertions.push_back(check("pair:absorbed_fraction", P.back() / P.front(), "<", cfg.tolerance("absorbed_fraction")));
    }

    std::ostringstream series;
    series << "t,P_seed_plus,P_seed_minus,P_packet,P_packet_left,P_packet_right,P_pair\n" << std::setprecision(17);
    const auto pl = side(f_single, false), pr = side(f_single, true);
    for (std::size_t i = 0; i < times.size(); ++i) {
        series << times[i] << ',' << f_plus[i].total << ',' << f_minus[i].total << ',' << f_single[i].total << ','
               << pl[i] << ',' << pr[i] << ',' << f_pair[i].total << '\n';
    }
    rep.files.push_back({"series.csv", series.str()});
    const int every = cfg.frame_every();
    rep.files.push_back({"frames_seed_plus.csv", frames_csv(f_plus, sites, every)});
    rep.files.push_back({"frames_seed_minus.csv", frames_csv(f_minus, sites, every)});
    rep.files.push_back({"frames_packet.csv", frames_csv(f_single, sites, every)});
    rep.files.push_back({"frames_pair.csv", frames_csv(f_pair, sites, every)});
    return rep;
}

// --------------------------------- absorb -----------------------------------

RunReport run_absorb(const ScenarioConfig& cfg) {
    std::vector<double> nus = cfg.get_reals("absorb.nus");
    for (double nu : nus) {
        if (!(nu > 0.0)) throw ConfigError("absorb.nus entries must be positive");
    }
    const int n0 = cfg.get_int("absorb.n0");
    const int right_len = cfg.get_int("lattice.right_len");
    if (n0 <= 0 || right_len <= 0) throw ConfigError("absorb.n0 and lattice.right_len must be positive");
    const LatticeSpec lattice = LatticeSpec::hard_wall(n0, n0, right_len);
    const std::vector<double> times = cfg.times();

    std::vector<Interferometer> centers;
    for (double nu : nus) {
        const Interferometer c = interferometer_from_dimer({1.0 / nu, nu}, kPi / 4.0);
        if (std::abs(c.delta * c.delta - c.gamma * c.gamma - 1.0) > cfg.tolerance("classify")) {
            throw ConfigError("absorb: (delta, gamma) for nu = " + num(nu) + " misses delta^2 - gamma^2 = 1");
        }
        centers.push_back(c);
    }

    const SiteIndex sites(lattice, CenterKind::PlusMinus);
    const DensityMatrix rho0 = left_lead_mixture(sites, n0);
    auto evolve = [&](const Interferometer& c) {
        const auto frames = profiles(evolve_density(build_hamiltonian(c, lattice), rho0, times), times);
        transit_metrics(frames, sites);
        return frames;
    };

    RunReport rep{"absorb", {}, {}, {}};
    std::vector<std::vector<ProfileFrame>> runs;
    for (const auto& c : centers) runs.push_back(evolve(c));
    const auto control = evolve(Interferometer{-1.0, 0.0, kPi / 4.0});

    double control_dev = 0.0;
    for (const auto& f : control) control_dev = std::max(control_dev, std::abs(f.total - 1.0));
    rep.assertions.push_back(check("hermitian_control_conserves_P", control_dev, "<", cfg.tolerance("norm")));

    // quarter time index for the rapid-drop check
    const double t_quarter = times.back() / 4.0;
    std::size_t iq = 0;
    while (iq + 1 < times.size() && times[iq] < t_quarter) ++iq;

    for (std::size_t r = 0; r < nus.size(); ++r) {
        const auto& f = runs[r];
        const std::string tag = "nu=" + short_num(nus[r]);
        const double total_drop = f.front().total - f.back().total;
        const double early = total_drop > 0.0 ? (f.front().total - f[iq].total) / total_drop : 0.0;
        rep.metrics[tag + ".delta"] = num(centers[r].delta);
        rep.metrics[tag + ".gamma"] = num(centers[r].gamma);
        rep.metrics[tag + ".P_final"] = num(f.back().total);
        rep.metrics[tag + ".early_drop_fraction"] = num(early);
        rep.assertions.push_back(check(tag + ":rapid_initial_drop", early, ">", 0.5));
    }

    std::vector<std::size_t> order(nus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nus[a] > nus[b]; });
    bool monotone = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
        monotone = monotone && runs[order[i]].back().total < runs[order[i - 1]].back().total;
    }
    rep.assertions.push_back(check_true("final_P_decreasing_in_inverse_nu", monotone));
    const std::size_t smallest = order.back();
    rep.assertions.push_back(check("nu=" + short_num(nus[smallest]) + ":final_P", runs[smallest].back().total, "<",
                                   cfg.tolerance("absorb_final")));

    std::ostringstream series;
    series << "t";
    for (double nu : nus) series << ",P_nu_" << short_num(nu);
    series << ",P_control\n" << std::setprecision(17);
    for (std::size_t i = 0; i < times.size(); ++i) {
        series << times[i];
        for (const auto& run : runs) series << ',' << run[i].total;
        series << ',' << control[i].total << '\n';
    }
    rep.files.push_back({"absorb.csv", series.str()});
    const int every = cfg.frame_every();
    for (std::size_t r = 0; r < nus.size(); ++r) {
        rep.files.push_back({"frames_nu_" + short_num(nus[r]) + ".csv", frames_csv(runs[r], sites, every)});
    }
    return rep;
}

// --------------------------------- verify -----------------------------------

RunReport run_verify(const ScenarioConfig& cfg) {
    const LatticeSpec lattice = cfg.lattice();
    const int residual_sites = cfg.get_int("verify.residual_sites");
    const int n_dimers = cfg.get_int("verify.random_dimers");
    const int n_potentials = cfg.get_int("verify.random_potentials");
    if (residual_sites <= 2 || n_dimers < 0 || n_potentials < 0) throw ConfigError("verify: bad battery sizes");
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("run.seed"));

    RunReport rep{"verify", {}, {}, {}};
    auto& A = rep.assertions;

    // alpha/beta rotation
    for (auto [d, g] : {std::pair{-1.25, 0.75}, std::pair{0.75, 1.25}, std::pair{0.0, 0.0}, std::pair{0.3, -2.1}}) {
        const auto H = build_hamiltonian(Interferometer{d, g, kPi / 4.0}, lattice);
        const auto rotated = alpha_beta_rotation(H);
        const DimerParams p = dimer_from_interferometer(d, g);
        const auto direct = build_hamiltonian(AsymmetricDimer{p.mu, p.nu}, lattice);
        A.push_back(check("rotation[delta=" + short_num(d) + ",gamma=" + short_num(g) + "]",
                          max_abs(rotated.entries - direct.entries), "<", cfg.tolerance("rotation")));
    }
    {
        const BasisChange b = alpha_beta_basis(lattice);
        A.push_back(check("rotation_unitary", max_abs(b.U.adjoint() * b.U - Matrix::Identity(b.U.rows(), b.U.cols())), "<",
                          1e-14));
    }

    // biorthogonal scaling
    for (auto [mu, nu] : {std::pair{0.5, 2.0}, std::pair{-2.0, 0.5}, std::pair{3.0, 5.0}, std::pair{-3.0, 0.7}}) {
        const auto H = build_hamiltonian(AsymmetricDimer{mu, nu}, lattice);
        const auto S = biorthogonal_scale(H);
        const std::string tag = "[mu=" + short_num(mu) + ",nu=" + short_num(nu) + "]";
        A.push_back(check("scaling_spectrum" + tag,
                          spectral_distance(sorted_eigenvalues(H.entries), sorted_eigenvalues(S.entries)), "<",
                          cfg.tolerance("spectrum")));
        if (mu * nu > 0.0) {
            A.push_back(check("scaling_hermitian" + tag, hermiticity_defect(S.entries), "<", cfg.tolerance("hermiticity")));
        }
        A.push_back(check("biorthonormal" + tag, biorthogonal_basis(lattice, {mu, nu}).inverse_error(), "<", 1e-12));
    }
    for (auto [d, g] : {std::pair{-1.25, 0.75}, std::pair{1.25, 0.75}, std::pair{-1.0, 0.0}}) {
        const auto chain = biorthogonal_scale(alpha_beta_rotation(build_hamiltonian(Interferometer{d, g, kPi / 4.0}, lattice)));
        A.push_back(check("resonant_chain_hermitian[delta=" + short_num(d) + ",gamma=" + short_num(g) + "]",
                          hermiticity_defect(chain.entries), "<", cfg.tolerance("hermiticity")));
    }

    // parity decomposition at mu*nu = -1
    if (lattice.left_boundary == LeftBoundary::Open && lattice.left_len == lattice.right_len) {
        const auto h_eq = biorthogonal_scale(build_hamiltonian(AsymmetricDimer{-2.0, 0.5}, lattice));
        const BlockDecomposition blocks = parity_decompose(h_eq);
        const Matrix hp = blocks.embedded_plus(), hm = blocks.embedded_minus();
        A.push_back(check("parity_off_block", blocks.off_block_max, "<", 1e-12));
        A.push_back(check("parity_commutator", frobenius(hp * hm - hm * hp), "<", cfg.tolerance("commutator")));
        A.push_back(check("parity_reassembly", frobenius(h_eq.entries - hp - hm), "<", 1e-12));
        std::vector<cplx> joint = sorted_eigenvalues(blocks.h_plus);
        const auto minus_ev = sorted_eigenvalues(blocks.h_minus);
        joint.insert(joint.end(), minus_ev.begin(), minus_ev.end());
        A.push_back(check("parity_spectrum", spectral_distance(joint, sorted_eigenvalues(h_eq.entries)), "<",
                          cfg.tolerance("spectrum")));
        const cplx a = blocks.plus_end_potential, b = blocks.minus_end_potential;
        const double set_err = std::min(std::abs(a - cplx(0, 1)) + std::abs(b - cplx(0, -1)),
                                        std::abs(a - cplx(0, -1)) + std::abs(b - cplx(0, 1)));
        A.push_back(check("parity_end_potentials_are_plus_minus_i", set_err, "<", 1e-12));
        rep.metrics["parity.plus_end_potential"] = num(a.real()) + "," + num(a.imag());
        rep.metrics["parity.minus_end_potential"] = num(b.real()) + "," + num(b.imag());
    }

    // analytic residuals on random parameters
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> hop(-3.0, 3.0), mom(0.05, kPi - 0.05);
    const LatticeSpec small = LatticeSpec::symmetric(residual_sites);
    double worst_dimer = 0.0, worst_onsite = 0.0;
    for (int i = 0; i < n_dimers;) {
        const double mu = hop(rng), nu = hop(rng), k = mom(rng);
        const auto a = dimer_amplitudes({mu, nu}, k, Incidence::Left);
        if (a.divergent || std::abs(a.r) > 50.0) continue;
        const auto H = build_hamiltonian(AsymmetricDimer{mu, nu}, small);
        for (Incidence inc : {Incidence::Left, Incidence::Right}) {
            worst_dimer = std::max(worst_dimer, lattice_residual(H, scattering_state(H, k, inc), dispersion(k)));
        }
        ++i;
    }
    for (int i = 0; i < n_potentials;) {
        const cplx V(hop(rng), hop(rng));
        const double k = mom(rng);
        const auto a = onsite_amplitudes(V, k);
        if (a.divergent || std::abs(a.r) > 50.0) continue;
        const auto H = build_hamiltonian(OnSitePotential{V}, small);
        for (Incidence inc : {Incidence::Left, Incidence::Right}) {
            worst_onsite = std::max(worst_onsite, lattice_residual(H, scattering_state(H, k, inc), dispersion(k)));
        }
        ++i;
    }
    A.push_back(check("bethe_residual_dimer", worst_dimer, "<", cfg.tolerance("residual")));
    A.push_back(check("bethe_residual_onsite", worst_onsite, "<", cfg.tolerance("residual")));
    {
        double worst = 0.0;
        const auto H = build_hamiltonian(Interferometer{-1.25, 0.75, kPi / 4.0}, small);
        for (double k : {kPi / 6.0, kPi / 3.0, kPi / 2.0, 2.0}) {
            for (Incidence inc : {Incidence::Left, Incidence::Right}) {
                worst = std::max(worst, lattice_residual(H, scattering_state(H, k, inc), dispersion(k)));
            }
        }
        A.push_back(check("bethe_residual_interferometer", worst, "<", cfg.tolerance("residual")));
    }

    // Hermitian unitarity, sign symmetry, resonance
    const int grid = 49;
    double unitarity = 0.0, sign_sym = 0.0, res_r = 0.0, ratio_err = 0.0, amp_err = 0.0;
    for (int i = 1; i <= grid; ++i) {
        const double k = i * kPi / (grid + 1);
        for (Incidence inc : {Incidence::Left, Incidence::Right}) {
            for (double V : {-2.0, -0.5, 0.3, 1.0, 3.0}) {
                const auto a = onsite_amplitudes(V, k, inc);
                unitarity = std::max(unitarity, std::abs(a.T + a.R - 1.0));
                sign_sym = std::max(sign_sym, std::abs(a.T - onsite_amplitudes(-V, k, inc).T));
            }
            for (double m : {0.5, 1.0, 2.0, -1.5}) {
                const auto a = dimer_amplitudes({m, m}, k, inc);
                unitarity = std::max(unitarity, std::abs(a.T + a.R - 1.0));
            }
            for (double d : {-1.25, 0.5, 2.0}) {
                const auto a = amplitudes_for(Interferometer{d, 0.0, kPi / 4.0}, k, inc);
                unitarity = std::max(unitarity, std::abs(a.T + a.R - 1.0));
            }
            for (auto [mu, nu] : {std::pair{0.5, 2.0}, std::pair{2.0, 0.5}, std::pair{-1.0, -1.0}, std::pair{4.0, 0.25}}) {
                res_r = std::max(res_r, std::abs(dimer_amplitudes({mu, nu}, k, inc).r));
            }
        }
        amp_err = std::max(amp_err, std::abs(amplification_coefficient({0.5, 2.0}, k, Incidence::Left) - 4.0));
        for (auto [mu, nu] : {std::pair{3.0, 5.0}, std::pair{-0.7, 1.9}}) {
            const cplx tl = dimer_amplitudes({mu, nu}, k, Incidence::Left).t;
            const cplx tr = dimer_amplitudes({mu, nu}, k, Incidence::Right).t;
            ratio_err = std::max(ratio_err, std::abs(tl / tr - nu / mu));
        }
    }
    A.push_back(check("hermitian_T_plus_R_is_1", unitarity, "<", cfg.tolerance("unitarity")));
    A.push_back(check("real_V_sign_symmetry", sign_sym, "<", 1e-14));
    A.push_back(check("resonant_r_vanishes", res_r, "<", 1e-14));
    A.push_back(check("amplification_k_independent", amp_err, "<", 1e-12));
    A.push_back(check("left_right_ratio_nu_over_mu", ratio_err, "<", 1e-12));
    {
        const auto up = onsite_amplitudes(cplx(0, 2), kPi / 2.0);
        const auto down = onsite_amplitudes(cplx(0, -2), kPi / 2.0);
        A.push_back(check_true("onsite_gain_pole_at_half_pi", up.divergent));
        A.push_back(check("onsite_loss_T_quarter", std::abs(down.T - 0.25), "<", 1e-15));
    }

    std::ostringstream table;
    table << "name,measured,relation,threshold,passed\n" << std::setprecision(17);
    for (const auto& a : A) {
        table << '"' << a.name << "\"," << a.measured << ',' << a.relation << ',' << a.threshold << ','
              << (a.passed ? "true" : "false") << '\n';
    }
    rep.files.push_back({"verify.csv", table.str()});
    rep.metrics["assertions"] = std::to_string(A.size());
    return rep;
}

// -------------------------------- dispatch ----------------------------------

RunReport run_scenario(const ScenarioConfig& cfg) {
    const std::string& s = cfg.scenario();
    if (s == "sweep") return run_sweep(cfg);
    if (s == "amplify") return run_amplify(cfg);
    if (s == "flux-deviation") return run_flux_deviation(cfg);
    if (s == "singularity") return run_singularity(cfg);
    if (s == "absorb") return run_absorb(cfg);
    if (s == "verify") return run_verify(cfg);
    throw ConfigError("unknown scenario '" + s + "'");
}

RunManifest execute(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    RunManifest manifest;
    manifest.config_snapshot = cfg.to_text();
    manifest.version = code_version();
    std::filesystem::create_directories(out_dir);

    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (out_dir / name).string());
        out << content;
    };

    const auto start = std::chrono::steady_clock::now();
    try {
        RunReport rep = run_scenario(cfg);
        for (const auto& f : rep.files) {
            write(f.name, f.content);
            manifest.outputs.push_back(f.name);
        }
        std::ostringstream metrics;
        write_key_values(metrics, rep.metrics);
        write("metrics.txt", metrics.str());
        manifest.outputs.push_back("metrics.txt");
        manifest.assertions = std::move(rep.assertions);
    } catch (const ConfigError& e) {
        manifest.error = e.what();
        manifest.invalid_config = true;
    } catch (const std::exception& e) {
        manifest.error = e.what();
    }
    manifest.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write("manifest.txt", manifest.to_text());
    return manifest;
}

}  // namespace nhscat
