// Scattering-center parameters, site indexing and dense Hamiltonians
// for a two-lead tight-binding chain with unit hopping.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <variant>

namespace nhscat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// --------------------------------- centers ---------------------------------

/// Single site 0 carrying a complex on-site energy V (V = i*gamma models gain/loss).
struct OnSitePotential {
    cplx V{0.0, 0.0};
};

/// Two-site Aharonov-Bohm cluster |+>, |-> threaded by flux phi, with
/// imaginary potentials +i*gamma / -i*gamma and inter-site coupling delta.
struct Interferometer {
    double delta{0.0};
    double gamma{0.0};
    double phi{0.0};
};

/// Two sites alpha, beta with H(alpha,beta) = -mu and H(beta,alpha) = -nu.
struct AsymmetricDimer {
    double mu{1.0};
    double nu{1.0};
};

using CenterSpec = std::variant<OnSitePotential, Interferometer, AsymmetricDimer>;

enum class CenterKind { Single, PlusMinus, AlphaBeta };

CenterKind center_kind(const CenterSpec& center);
int center_size(CenterKind kind);
std::string center_name(const CenterSpec& center);

// Throws std::invalid_argument on non-finite parameters.
void validate(const CenterSpec& center);

struct DimerParams {
    double mu{1.0};
    double nu{1.0};

    double product() const noexcept { return mu * nu; }
    bool is_resonant(double tol) const noexcept;
    bool is_singular(double tol) const noexcept;
};

inline constexpr double kClassifyTol = 1e-9;

/// Reduction of the interferometer at phi = pi/4: mu = -(delta+gamma), nu = -(delta-gamma).
/// The caller is responsible for phi being pi/4.
DimerParams dimer_from_interferometer(double delta, double gamma) noexcept;

/// Columns |alpha>, |beta> expressed in the |+>, |-> basis:
/// alpha = (e^{i pi/4}|+> + e^{-i pi/4}|->)/sqrt2, beta = -i(e^{i pi/4}|+> - e^{-i pi/4}|->)/sqrt2.
Eigen::Matrix2cd alpha_beta_block();

/// Inverse on the mu, nu > 0 branch is not unique; this returns delta = -(mu+nu)/2,
/// gamma = (nu-mu)/2.
Interferometer interferometer_from_dimer(DimerParams params, double phi);

// --------------------------------- lattice ---------------------------------

enum class LeftBoundary { Open, HardWall };

struct LatticeSpec {
    int left_len{1};
    int right_len{1};
    LeftBoundary left_boundary{LeftBoundary::Open};
    int n0{0};  // hard-wall position, only used with LeftBoundary::HardWall

    /// Number of left-lead sites actually present (n0 behind a hard wall).
    int left_sites() const noexcept {
        return left_boundary == LeftBoundary::HardWall ? n0 : left_len;
    }

    void validate() const;

    static LatticeSpec symmetric(int len) { return LatticeSpec{len, len}; }
    static LatticeSpec hard_wall(int left_len, int n0, int right_len) {
        return LatticeSpec{left_len, right_len, LeftBoundary::HardWall, n0};
    }
};

// ------------------------------- site labels -------------------------------

enum class SiteKind { Lead, Origin, Alpha, Beta, Plus, Minus };

struct SiteLabel {
    SiteKind kind{SiteKind::Lead};
    int j{0};  // lead coordinate, nonzero; unused for center sites

    static SiteLabel lead(int j) { return SiteLabel{SiteKind::Lead, j}; }
    static SiteLabel origin() { return SiteLabel{SiteKind::Origin, 0}; }
    static SiteLabel alpha() { return SiteLabel{SiteKind::Alpha, 0}; }
    static SiteLabel beta() { return SiteLabel{SiteKind::Beta, 0}; }
    static SiteLabel plus() { return SiteLabel{SiteKind::Plus, 0}; }
    static SiteLabel minus() { return SiteLabel{SiteKind::Minus, 0}; }

    bool is_lead() const noexcept { return kind == SiteKind::Lead; }
    std::string to_string() const;

    friend bool operator==(const SiteLabel&, const SiteLabel&) = default;
};

/// Canonical ordering: left lead -L..-1 ascending, then the center site(s)
/// (0 | alpha, beta | +, -), then right lead 1..R ascending.
class SiteIndex {
public:
    SiteIndex(const LatticeSpec& lattice, CenterKind kind);

    int dim() const noexcept { return left_ + ncenter_ + right_; }
    int left_sites() const noexcept { return left_; }
    int right_sites() const noexcept { return right_; }
    int center_begin() const noexcept { return left_; }
    int center_end() const noexcept { return left_ + ncenter_; }
    CenterKind kind() const noexcept { return kind_; }
    const LatticeSpec& lattice() const noexcept { return lattice_; }

    bool is_lead_index(int idx) const noexcept { return idx < left_ || idx >= left_ + ncenter_; }

    /// Throws std::out_of_range for labels not present in this lattice.
    int index(const SiteLabel& site) const;
    SiteLabel label(int idx) const;
    /// Lead coordinate j of a lead index (throws for center indices).
    int lead_coordinate(int idx) const;

private:
    LatticeSpec lattice_;
    CenterKind kind_;
    int left_;
    int ncenter_;
    int right_;
};

int site_to_index(const LatticeSpec& lattice, CenterKind kind, const SiteLabel& site);
SiteLabel index_to_site(const LatticeSpec& lattice, CenterKind kind, int idx);

// ------------------------------- Hamiltonian --------------------------------

/// Basis in which the entries are expressed. Site is the physical basis;
/// the others are produced by the transforms module.
enum class Representation { Site, Biorthogonal };

struct HamiltonianMatrix {
    Matrix entries;
    CenterSpec center;
    LatticeSpec lattice;
    Representation representation{Representation::Site};

    int dim() const noexcept { return static_cast<int>(entries.rows()); }
    SiteIndex sites() const { return SiteIndex(lattice, center_kind(center)); }
    /// Coefficient of |a><b|.
    cplx at(const SiteLabel& a, const SiteLabel& b) const;
};

HamiltonianMatrix build_hamiltonian(const CenterSpec& center, const LatticeSpec& lattice);

}  // namespace nhscat
