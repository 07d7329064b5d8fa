#include "nhscat/transforms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nhscat {

namespace {

constexpr double kPhiTol = 1e-12;

const AsymmetricDimer& require_dimer(const HamiltonianMatrix& H, const char* who) {
    const auto* d = std::get_if<AsymmetricDimer>(&H.center);
    if (!d) throw std::invalid_argument(std::string(who) + ": expected an AsymmetricDimer Hamiltonian");
    return *d;
}

bool less_re_im(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

double BasisChange::inverse_error() const {
    return max_abs(U_inv * U - Matrix::Identity(U.rows(), U.cols()));
}

// ------------------------------- alpha / beta -------------------------------

BasisChange alpha_beta_basis(const LatticeSpec& lattice) {
    const SiteIndex sites(lattice, CenterKind::PlusMinus);
    const int n = sites.dim();
    const int c = sites.center_begin();
    Matrix U = Matrix::Identity(n, n);
    U.block<2, 2>(c, c) = alpha_beta_block();
    Matrix U_inv = U.adjoint();
    return BasisChange{std::move(U), std::move(U_inv), BasisKind::AlphaBeta};
}

HamiltonianMatrix alpha_beta_rotation(const HamiltonianMatrix& H_int) {
    const auto* c = std::get_if<Interferometer>(&H_int.center);
    if (!c || H_int.representation != Representation::Site) {
        throw std::invalid_argument("alpha_beta_rotation: expected a site-basis Interferometer Hamiltonian");
    }
    if (std::abs(c->phi - std::numbers::pi / 4.0) > kPhiTol) {
        throw std::domain_error("alpha_beta_rotation: the dimer reduction only exists at phi = pi/4");
    }
    const BasisChange b = alpha_beta_basis(H_int.lattice);
    const DimerParams p = dimer_from_interferometer(c->delta, c->gamma);
    return HamiltonianMatrix{b.apply(H_int.entries), AsymmetricDimer{p.mu, p.nu}, H_int.lattice,
                             Representation::Site};
}

// ------------------------------ biorthogonal --------------------------------

BasisChange biorthogonal_basis(const LatticeSpec& lattice, DimerParams params) {
    if (params.mu == 0.0 || params.nu == 0.0) {
        throw std::invalid_argument("biorthogonal scaling needs mu != 0 and nu != 0");
    }
    const SiteIndex sites(lattice, CenterKind::AlphaBeta);
    const int n = sites.dim();
    const cplx s = std::sqrt(cplx(params.nu / params.mu, 0.0));
    Vector scale = Vector::Ones(n);
    Vector inv = Vector::Ones(n);
    for (int i = sites.index(SiteLabel::beta()); i < n; ++i) {
        scale(i) = s;
        inv(i) = 1.0 / s;
    }
    return BasisChange{scale.asDiagonal().toDenseMatrix(), inv.asDiagonal().toDenseMatrix(),
                       BasisKind::BiorthogonalScale};
}

HamiltonianMatrix biorthogonal_scale(const HamiltonianMatrix& H_eq) {
    const auto& d = require_dimer(H_eq, "biorthogonal_scale");
    if (H_eq.representation != Representation::Site) {
        throw std::invalid_argument("biorthogonal_scale: input is already scaled");
    }
    const DimerParams p{d.mu, d.nu};
    if (p.mu == 0.0 || p.nu == 0.0) throw std::invalid_argument("biorthogonal_scale: mu and nu must be nonzero");

    // S is diagonal, so S^{-1} H S is H(a,b) * s_b / s_a; skip the dense products.
    const BasisChange b = biorthogonal_basis(H_eq.lattice, p);
    Matrix out = H_eq.entries;
    for (Eigen::Index col = 0; col < out.cols(); ++col) {
        for (Eigen::Index row = 0; row < out.rows(); ++row) {
            if (out(row, col) != cplx(0.0)) out(row, col) *= b.U_inv(row, row) * b.U(col, col);
        }
    }
    return HamiltonianMatrix{std::move(out), H_eq.center, H_eq.lattice, Representation::Biorthogonal};
}

// ---------------------------------- parity ----------------------------------

Matrix BlockDecomposition::embedded_plus() const {
    const Eigen::Index m = h_plus.rows();
    const Eigen::Index n = basis.U.rows();
    Matrix block = Matrix::Zero(n, n);
    block.topLeftCorner(m, m) = h_plus;
    return basis.U * block * basis.U_inv;
}

Matrix BlockDecomposition::embedded_minus() const {
    const Eigen::Index m = h_minus.rows();
    const Eigen::Index n = basis.U.rows();
    Matrix block = Matrix::Zero(n, n);
    block.bottomRightCorner(m, m) = h_minus;
    return basis.U * block * basis.U_inv;
}

BlockDecomposition parity_decompose(const HamiltonianMatrix& h_eq, double tol) {
    const auto& d = require_dimer(h_eq, "parity_decompose");
    if (h_eq.representation != Representation::Biorthogonal) {
        throw std::invalid_argument("parity_decompose: expected the biorthogonally scaled Hamiltonian");
    }
    if (!DimerParams{d.mu, d.nu}.is_singular(tol)) {
        throw std::invalid_argument("parity_decompose: requires mu*nu = -1");
    }
    const SiteIndex sites = h_eq.sites();
    if (h_eq.lattice.left_boundary != LeftBoundary::Open || sites.left_sites() != sites.right_sites()) {
        throw std::invalid_argument("parity_decompose: requires equal open leads");
    }

    const int n = sites.dim();
    const int half = n / 2;  // left lead + alpha
    const double h = 1.0 / std::sqrt(2.0);

    BlockDecomposition out;
    Matrix U = Matrix::Zero(n, n);
    for (int i = 0; i < half; ++i) {
        const int mirror = n - 1 - i;
        out.embedding.emplace_back(i, mirror);
        U(i, i) = h;
        U(mirror, i) = h;
        U(i, half + i) = h;
        U(mirror, half + i) = -h;
    }
    Matrix U_inv = U.transpose();
    const Matrix rotated = U_inv * h_eq.entries * U;

    out.h_plus = rotated.topLeftCorner(half, half);
    out.h_minus = rotated.bottomRightCorner(half, half);
    out.off_block_max = std::max(rotated.topRightCorner(half, half).cwiseAbs().maxCoeff(),
                                 rotated.bottomLeftCorner(half, half).cwiseAbs().maxCoeff());
    out.plus_end_potential = out.h_plus(half - 1, half - 1);
    out.minus_end_potential = out.h_minus(half - 1, half - 1);
    out.basis = BasisChange{std::move(U), std::move(U_inv), BasisKind::Parity};
    return out;
}

// ------------------------------ spectral tools ------------------------------

std::vector<cplx> sorted_eigenvalues(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver did not converge");
    std::vector<cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), less_re_im);
    return ev;
}

double spectral_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<cplx> sa = a, sb = b;
    std::sort(sa.begin(), sa.end(), less_re_im);
    std::sort(sb.begin(), sb.end(), less_re_im);
    std::vector<bool> used(sb.size(), false);
    double worst = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        // sb is sorted by Re: stop once the real gap alone exceeds the best match
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < sb.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(sa[i] - sb[j]);
            if (dist < best) {
                best = dist;
                best_j = j;
            }
            if (sb[j].real() - sa[i].real() > best) break;
        }
        used[best_j] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

double frobenius(const Matrix& m) { return m.norm(); }

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).norm(); }

}  // namespace nhscat
