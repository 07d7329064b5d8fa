#include "nhscat/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace nhscat {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

CenterKind center_kind(const CenterSpec& center) {
    return std::visit(overloaded{
                          [](const OnSitePotential&) { return CenterKind::Single; },
                          [](const Interferometer&) { return CenterKind::PlusMinus; },
                          [](const AsymmetricDimer&) { return CenterKind::AlphaBeta; },
                      },
                      center);
}

int center_size(CenterKind kind) { return kind == CenterKind::Single ? 1 : 2; }

std::string center_name(const CenterSpec& center) {
    switch (center_kind(center)) {
        case CenterKind::Single: return "onsite";
        case CenterKind::PlusMinus: return "interferometer";
        case CenterKind::AlphaBeta: return "dimer";
    }
    return "unknown";
}

void validate(const CenterSpec& center) {
    bool ok = std::visit(overloaded{
                             [](const OnSitePotential& c) { return finite(c.V.real()) && finite(c.V.imag()); },
                             [](const Interferometer& c) { return finite(c.delta) && finite(c.gamma) && finite(c.phi); },
                             [](const AsymmetricDimer& c) { return finite(c.mu) && finite(c.nu); },
                         },
                         center);
    if (!ok) throw std::invalid_argument("center parameters must be finite");
}

bool DimerParams::is_resonant(double tol) const noexcept { return std::abs(product() - 1.0) <= tol; }
bool DimerParams::is_singular(double tol) const noexcept { return std::abs(product() + 1.0) <= tol; }

DimerParams dimer_from_interferometer(double delta, double gamma) noexcept {
    return DimerParams{-(delta + gamma), -(delta - gamma)};
}

Eigen::Matrix2cd alpha_beta_block() {
    // e^{+-i pi/4}/sqrt2 = (1 +- i)/2 exactly
    Eigen::Matrix2cd u;
    u << cplx(0.5, 0.5), cplx(0.5, -0.5),
         cplx(0.5, -0.5), cplx(0.5, 0.5);
    return u;
}

Interferometer interferometer_from_dimer(DimerParams params, double phi) {
    return Interferometer{-(params.mu + params.nu) / 2.0, (params.nu - params.mu) / 2.0, phi};
}

void LatticeSpec::validate() const {
    if (left_len <= 0 || right_len <= 0) throw std::invalid_argument("lead lengths must be positive");
    if (left_boundary == LeftBoundary::HardWall && (n0 <= 0 || n0 > left_len)) {
        throw std::invalid_argument("hard wall requires 0 < N0 <= left_len");
    }
}

std::string SiteLabel::to_string() const {
    switch (kind) {
        case SiteKind::Lead: return std::to_string(j);
        case SiteKind::Origin: return "0";
        case SiteKind::Alpha: return "alpha";
        case SiteKind::Beta: return "beta";
        case SiteKind::Plus: return "plus";
        case SiteKind::Minus: return "minus";
    }
    return "?";
}

// --------------------------------- SiteIndex --------------------------------

SiteIndex::SiteIndex(const LatticeSpec& lattice, CenterKind kind)
    : lattice_(lattice), kind_(kind) {
    lattice_.validate();
    left_ = lattice_.left_sites();
    ncenter_ = center_size(kind);
    right_ = lattice_.right_len;
}

int SiteIndex::index(const SiteLabel& site) const {
    switch (site.kind) {
        case SiteKind::Lead:
            if (site.j < 0 && -site.j <= left_) return left_ + site.j;
            if (site.j > 0 && site.j <= right_) return left_ + ncenter_ + site.j - 1;
            break;
        case SiteKind::Origin:
            if (kind_ == CenterKind::Single) return left_;
            break;
        case SiteKind::Alpha:
            if (kind_ == CenterKind::AlphaBeta) return left_;
            break;
        case SiteKind::Beta:
            if (kind_ == CenterKind::AlphaBeta) return left_ + 1;
            break;
        case SiteKind::Plus:
            if (kind_ == CenterKind::PlusMinus) return left_;
            break;
        case SiteKind::Minus:
            if (kind_ == CenterKind::PlusMinus) return left_ + 1;
            break;
    }
    throw std::out_of_range("site " + site.to_string() + " is not part of this lattice");
}

SiteLabel SiteIndex::label(int idx) const {
    if (idx < 0 || idx >= dim()) throw std::out_of_range("site index out of range");
    if (idx < left_) return SiteLabel::lead(idx - left_);
    if (idx >= left_ + ncenter_) return SiteLabel::lead(idx - left_ - ncenter_ + 1);
    const int c = idx - left_;
    switch (kind_) {
        case CenterKind::Single: return SiteLabel::origin();
        case CenterKind::AlphaBeta: return c == 0 ? SiteLabel::alpha() : SiteLabel::beta();
        case CenterKind::PlusMinus: return c == 0 ? SiteLabel::plus() : SiteLabel::minus();
    }
    return SiteLabel::origin();
}

int SiteIndex::lead_coordinate(int idx) const {
    SiteLabel s = label(idx);
    if (!s.is_lead()) throw std::invalid_argument("index " + std::to_string(idx) + " is a center site");
    return s.j;
}

int site_to_index(const LatticeSpec& lattice, CenterKind kind, const SiteLabel& site) {
    return SiteIndex(lattice, kind).index(site);
}

SiteLabel index_to_site(const LatticeSpec& lattice, CenterKind kind, int idx) {
    return SiteIndex(lattice, kind).label(idx);
}

// -------------------------------- Hamiltonian -------------------------------

cplx HamiltonianMatrix::at(const SiteLabel& a, const SiteLabel& b) const {
    SiteIndex s = sites();
    return entries(s.index(a), s.index(b));
}

HamiltonianMatrix build_hamiltonian(const CenterSpec& center, const LatticeSpec& lattice) {
    lattice.validate();
    validate(center);
    const SiteIndex sites(lattice, center_kind(center));
    const int n = sites.dim();
    Matrix H = Matrix::Zero(n, n);

    auto hop = [&](int a, int b, cplx value) { H(a, b) += value; };
    auto hermitian_hop = [&](int a, int b, cplx value) {
        H(a, b) += value;
        H(b, a) += std::conj(value);
    };

    // leads: -(|j><j+1| + |-j><-j-1| + h.c.)
    const int left = sites.left_sites();
    for (int j = 1; j < left; ++j) {
        hermitian_hop(sites.index(SiteLabel::lead(-j)), sites.index(SiteLabel::lead(-j - 1)), -1.0);
    }
    for (int j = 1; j < sites.right_sites(); ++j) {
        hermitian_hop(sites.index(SiteLabel::lead(j)), sites.index(SiteLabel::lead(j + 1)), -1.0);
    }

    const int m1 = sites.index(SiteLabel::lead(-1));
    const int p1 = sites.index(SiteLabel::lead(1));

    std::visit(overloaded{
                   [&](const OnSitePotential& c) {
                       const int o = sites.index(SiteLabel::origin());
                       hermitian_hop(m1, o, -1.0);
                       hermitian_hop(p1, o, -1.0);
                       hop(o, o, c.V);
                   },
                   [&](const Interferometer& c) {
                       const int plus = sites.index(SiteLabel::plus());
                       const int minus = sites.index(SiteLabel::minus());
                       const double a = 1.0 / std::sqrt(2.0);
                       for (auto [site, sigma] : {std::pair{plus, 1.0}, std::pair{minus, -1.0}}) {
                           hermitian_hop(m1, site, -std::polar(a, -sigma * c.phi));
                           hermitian_hop(p1, site, -std::polar(a, sigma * c.phi));
                       }
                       hermitian_hop(plus, minus, c.delta);
                       hop(plus, plus, cplx(0.0, c.gamma));
                       hop(minus, minus, cplx(0.0, -c.gamma));
                   },
                   [&](const AsymmetricDimer& c) {
                       const int alpha = sites.index(SiteLabel::alpha());
                       const int beta = sites.index(SiteLabel::beta());
                       hermitian_hop(m1, alpha, -1.0);
                       hermitian_hop(p1, beta, -1.0);
                       hop(alpha, beta, -c.mu);
                       hop(beta, alpha, -c.nu);
                   },
               },
               center);

    return HamiltonianMatrix{std::move(H), center, lattice, Representation::Site};
}

}  // namespace nhscat
