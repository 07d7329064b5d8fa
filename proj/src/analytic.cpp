#include "nhscat/analytic.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <variant>

namespace nhscat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhiTol = 1e-12;

void check_momentum(double k) {
    if (!(k > 0.0 && k < std::numbers::pi)) throw std::domain_error("momentum k must lie in (0, pi)");
}

ScatteringAmplitudes make_divergent(double k, Incidence incidence) {
    ScatteringAmplitudes a;
    a.k = k;
    a.incidence = incidence;
    a.r = cplx(kInf, 0.0);
    a.t = cplx(kInf, 0.0);
    a.T = kInf;
    a.R = kInf;
    a.divergent = true;
    a.pole_order = 1;
    return a;
}

ScatteringAmplitudes make_finite(double k, Incidence incidence, cplx r, cplx t) {
    return ScatteringAmplitudes{k, incidence, r, t, std::norm(t), std::norm(r), false, 0};
}

cplx phase(double x) { return std::polar(1.0, x); }

}  // namespace

ScatteringAmplitudes dimer_amplitudes(DimerParams params, double k, Incidence incidence) {
    check_momentum(k);
    const double mn = params.product();
    const cplx e2 = phase(-2.0 * k);
    const cplx den = mn - e2;
    if (std::abs(den) <= kPoleTol * (1.0 + std::abs(mn))) return make_divergent(k, incidence);
    const double hop = incidence == Incidence::Left ? params.nu : params.mu;
    return make_finite(k, incidence, (1.0 - mn) / den, hop * (1.0 - e2) / den);
}

ScatteringAmplitudes onsite_amplitudes(cplx V, double k, Incidence incidence) {
    check_momentum(k);
    const cplx s(0.0, 2.0 * std::sin(k));
    const cplx den = s - V;
    if (std::abs(den) <= kPoleTol * (1.0 + std::abs(V))) return make_divergent(k, incidence);
    return make_finite(k, incidence, V / den, s / den);
}

double amplification_coefficient(DimerParams params, double k, Incidence incidence, double tol) {
    if (!params.is_resonant(tol)) {
        throw std::domain_error("amplification coefficient requires mu*nu = 1 (got " +
                                std::to_string(params.product()) + ")");
    }
    return dimer_amplitudes(params, k, incidence).T;
}

SingularityReport classify(DimerParams params, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify tolerance must be positive");
    SingularityReport rep;
    rep.is_resonant = params.is_resonant(tol);
    rep.is_singular = params.is_singular(tol);
    if (rep.is_singular) rep.singular_momenta.push_back(std::numbers::pi / 2.0);
    rep.gamma_threshold_met = std::abs((params.nu - params.mu) / 2.0) > 1.0;
    return rep;
}

cplx singular_wavefunction(DimerParams params, Branch sign, const SiteLabel& site, double tol) {
    if (!params.is_singular(tol)) throw std::domain_error("singular wavefunction requires mu*nu = -1");
    const double s = sign == Branch::Plus ? 1.0 : -1.0;
    const double h = std::numbers::pi / 2.0;
    switch (site.kind) {
        case SiteKind::Alpha: return 1.0;
        case SiteKind::Beta: return params.nu * phase(-s * h);
        case SiteKind::Lead:
            if (site.j <= -1) return phase(s * h * site.j);
            if (site.j >= 1) return params.nu * phase(-s * h * (site.j + 1));
            break;
        default: break;
    }
    throw std::invalid_argument("site " + site.to_string() + " is not a dimer-lattice site");
}

ScatteringAmplitudes amplitudes_for(const CenterSpec& center, double k, Incidence incidence) {
    if (auto* c = std::get_if<OnSitePotential>(&center)) return onsite_amplitudes(c->V, k, incidence);
    if (auto* c = std::get_if<AsymmetricDimer>(&center)) return dimer_amplitudes({c->mu, c->nu}, k, incidence);
    const auto& c = std::get<Interferometer>(center);
    if (std::abs(c.phi - std::numbers::pi / 4.0) > kPhiTol) {
        throw std::domain_error("interferometer amplitudes are only closed-form at phi = pi/4");
    }
    return dimer_amplitudes(dimer_from_interferometer(c.delta, c.gamma), k, incidence);
}

Vector scattering_state(const HamiltonianMatrix& H, double k, Incidence incidence) {
    if (H.representation != Representation::Site) throw std::invalid_argument("scattering states need a site-basis Hamiltonian");
    const ScatteringAmplitudes a = amplitudes_for(H.center, k, incidence);
    if (a.divergent) throw std::domain_error("no finite scattering state at a spectral singularity");
    const SiteIndex sites = H.sites();
    const bool from_left = incidence == Incidence::Left;
    Vector psi = Vector::Zero(sites.dim());

    // Leads: incoming side carries e^{ikx} + r e^{-ikx}, outgoing side t e^{ik x'}.
    // `shift` is the extra phase offset of the transmitted branch.
    auto fill_leads = [&](int shift) {
        for (int idx = 0; idx < sites.dim(); ++idx) {
            if (!sites.is_lead_index(idx)) continue;
            const int j = sites.lead_coordinate(idx);
            const int x = from_left ? j : -j;  // mirrored coordinate
            psi(idx) = x < 0 ? phase(k * x) + a.r * phase(-k * x) : a.t * phase(k * (x + shift));
        }
    };

    switch (sites.kind()) {
        case CenterKind::Single:
            fill_leads(0);
            psi(sites.index(SiteLabel::origin())) = 1.0 + a.r;
            break;
        case CenterKind::AlphaBeta:
        case CenterKind::PlusMinus: {
            fill_leads(1);
            const cplx near = 1.0 + a.r, far = a.t * phase(k);
            const cplx alpha = from_left ? near : far;
            const cplx beta = from_left ? far : near;
            const int c0 = sites.center_begin();
            if (sites.kind() == CenterKind::AlphaBeta) {
                psi(c0) = alpha;
                psi(c0 + 1) = beta;
            } else {
                Eigen::Vector2cd pm = alpha_beta_block() * Eigen::Vector2cd(alpha, beta);
                psi(c0) = pm(0);
                psi(c0 + 1) = pm(1);
            }
            break;
        }
    }
    return psi;
}

double lattice_residual(const HamiltonianMatrix& H, const Vector& psi, cplx energy) {
    if (psi.size() != H.dim()) throw std::invalid_argument("state dimension does not match Hamiltonian");
    const Vector res = H.entries * psi - energy * psi;
    double worst = 0.0;
    for (Eigen::Index i = 1; i + 1 < res.size(); ++i) worst = std::max(worst, std::abs(res(i)));
    return worst;
}

std::vector<SweepRow> sweep(const CenterSpec& center, int samples) {
    if (samples <= 0) throw std::invalid_argument("sweep needs a positive sample count");
    validate(center);
    std::vector<SweepRow> rows;
    rows.reserve(samples);
    const double dk = std::numbers::pi / (samples + 1);
    for (int i = 1; i <= samples; ++i) {
        const double k = i * dk;
        rows.push_back({amplitudes_for(center, k, Incidence::Left), amplitudes_for(center, k, Incidence::Right)});
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, Incidence incidence) {
    os << "k,re_r,im_r,re_t,im_t,T,R\n";
    os << std::setprecision(17);
    for (const auto& row : rows) {
        const auto& a = incidence == Incidence::Left ? row.left : row.right;
        os << a.k << ',';
        if (a.divergent) {
            os << "inf,inf,inf,inf,inf,inf\n";
        } else {
            os << a.r.real() << ',' << a.r.imag() << ',' << a.t.real() << ',' << a.t.imag() << ',' << a.T << ','
               << a.R << '\n';
        }
    }
}

}  // namespace nhscat
