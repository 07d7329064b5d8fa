// Initial states, non-Hermitian time evolution of pure and mixed
// states, and Dirac-probability observables.
//
// Evolution is psi(t) = exp(-iHt) psi(0) and rho(t) = exp(-iHt) rho(0) exp(iH^dagger t).
// Dirac probabilities p(j,t) = |<j|psi(t)>|^2 are not conserved unless H is Hermitian.

#pragma once

#include "nhscat/analytic.hpp"
#include "nhscat/lattice.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhscat {

// ------------------------------- initial states ------------------------------

/// Amplitudes proportional to exp(-lambda^2 (j - N_A)^2 / 2) exp(i k0 j) on lead sites.
struct WavePacketSpec {
    int center{-60};
    double k0{0.0};
    double lambda{0.15};

    /// Half width w = 2 sqrt(ln 2) / lambda, in sites.
    double half_width() const;
    static WavePacketSpec from_half_width(int center, double k0, double w);
};

struct StateVector {
    Vector amplitudes;
    SiteIndex sites;

    double dirac_norm() const { return amplitudes.squaredNorm(); }
};

/// Unit-norm packet. Throws std::invalid_argument unless N_A +- 5/lambda lies
/// inside a single lead.
StateVector gaussian_packet(const SiteIndex& sites, const WavePacketSpec& spec);

/// |alpha> + i nu |beta> (Plus) or |alpha> - i nu |beta> (Minus); not normalized.
StateVector seed_state(const SiteIndex& sites, DimerParams params, Branch sign);

struct TwoPacketState {
    StateVector state;
    double center_overlap{0.0};  // Gaussian weight that falls on or past the center
    bool overlap_flag{false};    // center_overlap > 1e-10
};

/// |phi(-N_A, k0)> - i nu |phi(N_A, -k0)>, both packets unit-normalized first.
TwoPacketState antisym_two_packets(const SiteIndex& sites, int n_a, double k0, double lambda, double nu);

/// Re-express a dimer-basis state on the interferometer lattice (psi_int = U psi_dimer).
StateVector to_interferometer_basis(const StateVector& dimer_state);

// -------------------------------- propagation --------------------------------

enum class PropagatorMethod { Auto, Pade, Eigendecomposition };

struct PropagatorOptions {
    PropagatorMethod method{PropagatorMethod::Auto};
    double max_condition{1e8};  // eigenvector-matrix condition limit for the eigen route
};

class PropagatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caches exp(-i H dt) per distinct step dt. Padé scaling-and-squaring by default;
/// Auto falls back to the eigendecomposition route if the Padé result is not finite
/// and the eigenvector matrix is well conditioned.
class Propagator {
public:
    explicit Propagator(Matrix H, PropagatorOptions options = {});

    const Matrix& step(double dt);
    /// 1-norm condition estimate of the eigenvector matrix (computed on demand).
    double eigenvector_condition();

private:
    Matrix exp_pade(double dt) const;
    Matrix exp_eigen(double dt);
    void ensure_eigensystem();

    Matrix H_;
    PropagatorOptions options_;
    std::map<long long, Matrix> cache_;
    bool have_eigen_{false};
    Matrix V_, V_inv_;
    Vector evals_;
    double cond_{0.0};
};

/// States at each requested time. Times must be ascending and >= 0; a leading
/// t = 0 returns psi0 unchanged.
std::vector<StateVector> evolve_state(const HamiltonianMatrix& H, const StateVector& psi0,
                                      std::span<const double> times, PropagatorOptions options = {});

/// Mixed state stored as rho = F F^dagger, so Hermiticity and positivity hold
/// by construction.
class DensityMatrix {
public:
    /// Checks Hermiticity (1e-12) and the PSD floor (-1e-10), then factorizes.
    static DensityMatrix from_dense(const Matrix& rho, const SiteIndex& sites);
    static DensityMatrix from_factor(Matrix factor, const SiteIndex& sites);
    static DensityMatrix pure(const StateVector& psi);
    /// (1/N) sum over the given sites of |s><s|.
    static DensityMatrix uniform_mixture(const SiteIndex& sites, std::span<const SiteLabel> labels);

    Matrix entries() const { return factor_ * factor_.adjoint(); }
    Eigen::VectorXd diagonal() const { return factor_.rowwise().squaredNorm(); }
    double trace() const { return factor_.squaredNorm(); }
    /// Tr(rho^2) / (Tr rho)^2
    double purity() const;

    const Matrix& factor() const noexcept { return factor_; }
    const SiteIndex& sites() const noexcept { return sites_; }

private:
    DensityMatrix(Matrix factor, SiteIndex sites) : factor_(std::move(factor)), sites_(std::move(sites)) {}

    Matrix factor_;
    SiteIndex sites_;
};

/// rho(0) = (1/N0) sum_{j=1..N0} |-j><-j|
DensityMatrix left_lead_mixture(const SiteIndex& sites, int n0);

std::vector<DensityMatrix> evolve_density(const HamiltonianMatrix& H, const DensityMatrix& rho0,
                                          std::span<const double> times, PropagatorOptions options = {});

// -------------------------------- observables --------------------------------

struct ProfileFrame {
    double t{0.0};
    std::vector<double> p;
    double total{0.0};
};

ProfileFrame profile(const StateVector& psi, double t);
ProfileFrame profile(const DensityMatrix& rho, double t);

std::vector<ProfileFrame> profiles(const std::vector<StateVector>& states, std::span<const double> times);
std::vector<ProfileFrame> profiles(const std::vector<DensityMatrix>& states, std::span<const double> times);

struct LeadNorms {
    double left{0.0};
    double center{0.0};
    double right{0.0};
};

LeadNorms lead_norms(const ProfileFrame& frame, const SiteIndex& sites);

class BoundaryContamination : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TransitMetrics {
    double incident{0.0};
    double reflected{0.0};
    double transmitted{0.0};
    double gain{0.0};
    double distortion{-1.0};  // -1 when no reference was supplied
    int best_shift{0};
    double best_scale{0.0};
    double boundary_leak{0.0};
};

inline constexpr double kBoundaryLeakTol = 1e-6;
inline constexpr int kMaxDistortionShift = 10;

/// Reflected / transmitted Dirac norms at the last frame relative to the first.
/// With a reference run (same lattice), distortion is
///   min over integer shifts |s| <= 10 and scale c of || p_T - c * shift_s(q_T) ||_2 / P(0)
/// where p_T, q_T are the right-lead profiles of the final frames.
/// Throws BoundaryContamination if a truncated (open) end site ever carries more
/// than 1e-6 P(0); the left end behind a hard wall is exempt.
TransitMetrics transit_metrics(const std::vector<ProfileFrame>& frames, const SiteIndex& sites,
                               std::span<const ProfileFrame> reference = {});

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double r2{0.0};
};

/// Least-squares line through (x, y).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Long-format frame table with header t,j,p.
void write_frames_csv(std::ostream& os, const std::vector<ProfileFrame>& frames, const SiteIndex& sites);

/// "key = value" lines, in key order.
void write_key_values(std::ostream& os, const std::map<std::string, std::string>& values);

/// Uniform grid 0, dt, 2dt, ... up to t_max (inclusive when it lands on the grid).
std::vector<double> time_grid(double t_max, double dt);

}  // namespace nhscat
