#include "nhscat/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace nhscat {

namespace {

constexpr double kCenterOverlapTol = 1e-10;
constexpr double kTailSigmas = 5.0;
constexpr double kStepKeyScale = 1e12;

double ln2() { return std::log(2.0); }

// Unnormalized packet on every lead site; no placement checks.
Vector raw_packet(const SiteIndex& sites, int center, double k0, double lambda) {
    Vector v = Vector::Zero(sites.dim());
    for (int idx = 0; idx < sites.dim(); ++idx) {
        if (!sites.is_lead_index(idx)) continue;
        const double x = sites.lead_coordinate(idx) - center;
        v(idx) = std::exp(-0.5 * lambda * lambda * x * x) * std::polar(1.0, k0 * sites.lead_coordinate(idx));
    }
    return v;
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("packet lambda must be positive");
}

void check_fits_lattice(const SiteIndex& sites, int center, double lambda) {
    const double reach = kTailSigmas / lambda;
    if (center - reach < -sites.left_sites() || center + reach > sites.right_sites()) {
        throw std::invalid_argument("packet tail (5 sigma) is clipped by the lattice boundary");
    }
}

// Gaussian weight at positions >= 0 (left packet) or <= 0 (right packet).
double weight_past_center(int center, double lambda) {
    const int reach = static_cast<int>(std::ceil(12.0 / lambda)) + std::abs(center);
    double total = 0.0, past = 0.0;
    for (int x = center - reach; x <= center + reach; ++x) {
        const double d = x - center;
        const double w = std::exp(-lambda * lambda * d * d);
        total += w;
        if ((center < 0 && x >= 0) || (center > 0 && x <= 0) || center == 0) past += w;
    }
    return past / total;
}

void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw std::invalid_argument("times must be finite and >= 0");
        if (i && times[i] < times[i - 1]) throw std::invalid_argument("times must be ascending");
    }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

// ------------------------------- initial states ------------------------------

double WavePacketSpec::half_width() const { return 2.0 * std::sqrt(ln2()) / lambda; }

WavePacketSpec WavePacketSpec::from_half_width(int center, double k0, double w) {
    if (!(w > 0.0)) throw std::invalid_argument("half width must be positive");
    return WavePacketSpec{center, k0, 2.0 * std::sqrt(ln2()) / w};
}

StateVector gaussian_packet(const SiteIndex& sites, const WavePacketSpec& spec) {
    check_lambda(spec.lambda);
    check_fits_lattice(sites, spec.center, spec.lambda);
    const double reach = kTailSigmas / spec.lambda;
    if (spec.center - reach < 0.0 && spec.center + reach > 0.0) {
        throw std::invalid_argument("packet (5 sigma) overlaps the scattering center");
    }
    Vector v = raw_packet(sites, spec.center, spec.k0, spec.lambda);
    v /= v.norm();
    return StateVector{std::move(v), sites};
}

StateVector seed_state(const SiteIndex& sites, DimerParams params, Branch sign) {
    if (sites.kind() != CenterKind::AlphaBeta) throw std::invalid_argument("seed_state needs an alpha/beta dimer lattice");
    Vector v = Vector::Zero(sites.dim());
    v(sites.index(SiteLabel::alpha())) = 1.0;
    v(sites.index(SiteLabel::beta())) = cplx(0.0, sign == Branch::Plus ? params.nu : -params.nu);
    return StateVector{std::move(v), sites};
}

TwoPacketState antisym_two_packets(const SiteIndex& sites, int n_a, double k0, double lambda, double nu) {
    check_lambda(lambda);
    check_fits_lattice(sites, -n_a, lambda);
    check_fits_lattice(sites, n_a, lambda);
    Vector left = raw_packet(sites, -n_a, k0, lambda);
    Vector right = raw_packet(sites, n_a, -k0, lambda);
    left /= left.norm();
    right /= right.norm();
    TwoPacketState out{StateVector{left - cplx(0.0, nu) * right, sites}, 0.0, false};
    out.center_overlap = std::max(weight_past_center(-n_a, lambda), weight_past_center(n_a, lambda));
    out.overlap_flag = out.center_overlap > kCenterOverlapTol;
    return out;
}

StateVector to_interferometer_basis(const StateVector& dimer_state) {
    const SiteIndex& ds = dimer_state.sites;
    if (ds.kind() != CenterKind::AlphaBeta) throw std::invalid_argument("expected a dimer-basis state");
    SiteIndex target(ds.lattice(), CenterKind::PlusMinus);
    Vector v = dimer_state.amplitudes;
    const int c = ds.center_begin();
    v.segment<2>(c) = alpha_beta_block() * dimer_state.amplitudes.segment<2>(c);
    return StateVector{std::move(v), target};
}

// -------------------------------- propagation --------------------------------

Propagator::Propagator(Matrix H, PropagatorOptions options) : H_(std::move(H)), options_(options) {
    if (H_.rows() != H_.cols()) throw std::invalid_argument("propagator needs a square generator");
}

Matrix Propagator::exp_pade(double dt) const {
    Matrix A = cplx(0.0, -dt) * H_;
    return A.exp();
}

void Propagator::ensure_eigensystem() {
    if (have_eigen_) return;
    Eigen::ComplexEigenSolver<Matrix> solver(H_, true);
    if (solver.info() != Eigen::Success) throw PropagatorError("eigendecomposition did not converge");
    V_ = solver.eigenvectors();
    evals_ = solver.eigenvalues();
    Eigen::PartialPivLU<Matrix> lu(V_);
    V_inv_ = lu.inverse();
    const double n1 = V_.cwiseAbs().colwise().sum().maxCoeff();
    const double ni = V_inv_.cwiseAbs().colwise().sum().maxCoeff();
    cond_ = std::isfinite(n1 * ni) ? n1 * ni : std::numeric_limits<double>::infinity();
    have_eigen_ = true;
}

double Propagator::eigenvector_condition() {
    ensure_eigensystem();
    return cond_;
}

Matrix Propagator::exp_eigen(double dt) {
    ensure_eigensystem();
    if (!(cond_ < options_.max_condition)) {
        std::ostringstream msg;
        msg << "eigenvector matrix is ill-conditioned (cond_1 ~ " << cond_ << ", limit " << options_.max_condition
            << "); H is too close to defective for the eigen route";
        throw PropagatorError(msg.str());
    }
    Vector phases = (cplx(0.0, -dt) * evals_).array().exp();
    return V_ * phases.asDiagonal() * V_inv_;
}

const Matrix& Propagator::step(double dt) {
    const long long key = std::llround(dt * kStepKeyScale);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    Matrix U;
    switch (options_.method) {
        case PropagatorMethod::Pade: U = exp_pade(dt); break;
        case PropagatorMethod::Eigendecomposition: U = exp_eigen(dt); break;
        case PropagatorMethod::Auto:
            U = exp_pade(dt);
            if (!all_finite(U)) {
                try {
                    U = exp_eigen(dt);
                } catch (const PropagatorError& e) {
                    std::ostringstream msg;
                    msg << "Pade exponential overflowed (dt = " << dt
                        << ", ||H||_1 = " << H_.cwiseAbs().colwise().sum().maxCoeff() << ") and the fallback failed: "
                        << e.what();
                    throw PropagatorError(msg.str());
                }
            }
            break;
    }
    if (!all_finite(U)) throw PropagatorError("propagator for dt = " + std::to_string(dt) + " is not finite");
    return cache_.emplace(key, std::move(U)).first->second;
}

std::vector<StateVector> evolve_state(const HamiltonianMatrix& H, const StateVector& psi0,
                                      std::span<const double> times, PropagatorOptions options) {
    if (psi0.amplitudes.size() != H.dim()) throw std::invalid_argument("state dimension does not match Hamiltonian");
    check_times(times);
    Propagator prop(H.entries, options);
    std::vector<StateVector> out;
    out.reserve(times.size());
    Vector psi = psi0.amplitudes;
    double now = 0.0;
    for (double t : times) {
        if (t > now) {
            psi = prop.step(t - now) * psi;
            now = t;
        }
        out.push_back(StateVector{psi, psi0.sites});
    }
    return out;
}

// ------------------------------- density matrix ------------------------------

DensityMatrix DensityMatrix::from_dense(const Matrix& rho, const SiteIndex& sites) {
    if (rho.rows() != rho.cols() || rho.rows() != sites.dim()) throw std::invalid_argument("density matrix has wrong shape");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    const Eigen::VectorXd& w = es.eigenvalues();
    if (w.size() && w.minCoeff() < -1e-10) throw std::invalid_argument("density matrix is not positive semidefinite");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > 1e-14) keep.push_back(i);
    }
    Matrix F(rho.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        F.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(w(keep[c]));
    }
    return DensityMatrix(std::move(F), sites);
}

DensityMatrix DensityMatrix::from_factor(Matrix factor, const SiteIndex& sites) {
    if (factor.rows() != sites.dim()) throw std::invalid_argument("density factor has wrong row count");
    return DensityMatrix(std::move(factor), sites);
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(Matrix(psi.amplitudes), psi.sites);
}

DensityMatrix DensityMatrix::uniform_mixture(const SiteIndex& sites, std::span<const SiteLabel> labels) {
    if (labels.empty()) throw std::invalid_argument("mixture needs at least one site");
    const double amp = 1.0 / std::sqrt(static_cast<double>(labels.size()));
    Matrix F = Matrix::Zero(sites.dim(), static_cast<Eigen::Index>(labels.size()));
    for (std::size_t c = 0; c < labels.size(); ++c) F(sites.index(labels[c]), static_cast<Eigen::Index>(c)) = amp;
    return DensityMatrix(std::move(F), sites);
}

double DensityMatrix::purity() const {
    const double tr = trace();
    if (tr == 0.0) return 0.0;
    return (factor_.adjoint() * factor_).squaredNorm() / (tr * tr);
}

DensityMatrix left_lead_mixture(const SiteIndex& sites, int n0) {
    if (n0 <= 0 || n0 > sites.left_sites()) throw std::invalid_argument("N0 must fit in the left lead");
    std::vector<SiteLabel> labels;
    for (int j = 1; j <= n0; ++j) labels.push_back(SiteLabel::lead(-j));
    return DensityMatrix::uniform_mixture(sites, labels);
}

std::vector<DensityMatrix> evolve_density(const HamiltonianMatrix& H, const DensityMatrix& rho0,
                                          std::span<const double> times, PropagatorOptions options) {
    if (rho0.factor().rows() != H.dim()) throw std::invalid_argument("density dimension does not match Hamiltonian");
    check_times(times);
    Propagator prop(H.entries, options);
    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    Matrix F = rho0.factor();
    double now = 0.0;
    for (double t : times) {
        if (t > now) {
            F = prop.step(t - now) * F;
            now = t;
        }
        out.push_back(DensityMatrix::from_factor(F, rho0.sites()));
    }
    return out;
}

// -------------------------------- observables --------------------------------

ProfileFrame profile(const StateVector& psi, double t) {
    ProfileFrame f;
    f.t = t;
    f.p.resize(static_cast<std::size_t>(psi.amplitudes.size()));
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) f.p[static_cast<std::size_t>(i)] = std::norm(psi.amplitudes(i));
    f.total = std::accumulate(f.p.begin(), f.p.end(), 0.0);
    return f;
}

ProfileFrame profile(const DensityMatrix& rho, double t) {
    ProfileFrame f;
    f.t = t;
    const Eigen::VectorXd d = rho.diagonal();
    f.p.assign(d.data(), d.data() + d.size());
    f.total = std::accumulate(f.p.begin(), f.p.end(), 0.0);
    return f;
}

std::vector<ProfileFrame> profiles(const std::vector<StateVector>& states, std::span<const double> times) {
    if (states.size() != times.size()) throw std::invalid_argument("states and times differ in length");
    std::vector<ProfileFrame> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out.push_back(profile(states[i], times[i]));
    return out;
}

std::vector<ProfileFrame> profiles(const std::vector<DensityMatrix>& states, std::span<const double> times) {
    if (states.size() != times.size()) throw std::invalid_argument("states and times differ in length");
    std::vector<ProfileFrame> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out.push_back(profile(states[i], times[i]));
    return out;
}

LeadNorms lead_norms(const ProfileFrame& frame, const SiteIndex& sites) {
    if (static_cast<int>(frame.p.size()) != sites.dim()) throw std::invalid_argument("frame does not match lattice");
    LeadNorms n;
    for (int i = 0; i < sites.dim(); ++i) {
        const double v = frame.p[static_cast<std::size_t>(i)];
        if (i < sites.center_begin()) n.left += v;
        else if (i < sites.center_end()) n.center += v;
        else n.right += v;
    }
    return n;
}

TransitMetrics transit_metrics(const std::vector<ProfileFrame>& frames, const SiteIndex& sites,
                               std::span<const ProfileFrame> reference) {
    if (frames.empty()) throw std::invalid_argument("transit_metrics needs at least one frame");
    TransitMetrics m;
    m.incident = frames.front().total;
    if (!(m.incident > 0.0)) throw std::invalid_argument("incident Dirac norm is zero");

    // a hard wall is physical, only truncated lead ends count as contamination
    const bool open_left = sites.lattice().left_boundary == LeftBoundary::Open;
    for (const auto& f : frames) {
        if (static_cast<int>(f.p.size()) != sites.dim()) throw std::invalid_argument("frame does not match lattice");
        const double ends = (open_left ? f.p.front() : 0.0) + f.p.back();
        m.boundary_leak = std::max(m.boundary_leak, ends / m.incident);
    }
    if (m.boundary_leak > kBoundaryLeakTol) {
        std::ostringstream msg;
        msg << "boundary contamination: end-site probability reached " << m.boundary_leak
            << " of the incident norm; enlarge the leads or shorten t_max";
        throw BoundaryContamination(msg.str());
    }

    const LeadNorms last = lead_norms(frames.back(), sites);
    m.reflected = last.left;
    m.transmitted = last.right;
    m.gain = m.transmitted / m.incident;

    if (reference.empty()) return m;
    const auto& ref = reference.back().p;
    if (ref.size() != frames.back().p.size()) throw std::invalid_argument("reference lattice differs");

    const int begin = sites.center_end();
    const int n = sites.dim() - begin;
    auto at = [&](const std::vector<double>& v, int i) { return (i >= 0 && i < n) ? v[static_cast<std::size_t>(begin + i)] : 0.0; };
    const auto& dev = frames.back().p;

    double best = std::numeric_limits<double>::infinity();
    for (int s = -kMaxDistortionShift; s <= kMaxDistortionShift; ++s) {
        double pq = 0.0, qq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double p = at(dev, i), q = at(ref, i - s);
            pq += p * q;
            qq += q * q;
        }
        const double c = qq > 0.0 ? pq / qq : 0.0;
        // explicit residual; the expanded quadratic cancels down to ~1e-8
        double rr = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = at(dev, i) - c * at(ref, i - s);
            rr += d * d;
        }
        const double resid = std::sqrt(rr);
        if (resid < best) {
            best = resid;
            m.best_shift = s;
            m.best_scale = c;
        }
    }
    m.distortion = best / m.incident;
    return m;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

void write_frames_csv(std::ostream& os, const std::vector<ProfileFrame>& frames, const SiteIndex& sites) {
    os << "t,j,p\n" << std::setprecision(17);
    for (const auto& f : frames) {
        for (int i = 0; i < sites.dim(); ++i) {
            os << f.t << ',' << sites.label(i).to_string() << ',' << f.p[static_cast<std::size_t>(i)] << '\n';
        }
    }
}

void write_key_values(std::ostream& os, const std::map<std::string, std::string>& values) {
    for (const auto& [k, v] : values) os << k << " = " << v << '\n';
}

std::vector<double> time_grid(double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("time grid needs dt > 0 and t_max >= 0");
    const auto steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
    std::vector<double> t(static_cast<std::size_t>(steps + 1));
    for (long i = 0; i <= steps; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
    return t;
}

}  // namespace nhscat
