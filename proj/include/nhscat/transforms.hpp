// Equivalence transformations between the interferometer, the
// asymmetric dimer, its biorthogonally scaled (symmetric) form, and the
// parity-block decomposition at mu*nu = -1. Plus the spectral comparison tools
// used to certify them.

#pragma once

#include "nhscat/lattice.hpp"

#include <vector>

namespace nhscat {

enum class BasisKind { AlphaBeta, BiorthogonalScale, Parity };

/// Columns of `U` are the new basis vectors written in the old basis; the
/// transformed operator is U_inv * H * U. For the biorthogonal scaling the
/// rows of U_inv are the dual (left) basis vectors.
struct BasisChange {
    Matrix U;
    Matrix U_inv;
    BasisKind kind{BasisKind::AlphaBeta};

    /// max |U_inv U - 1|.
    double inverse_error() const;
    Matrix apply(const Matrix& H) const { return U_inv * H * U; }
};

/// Identity on the leads, alpha_beta_block() on the (+, -) pair.
BasisChange alpha_beta_basis(const LatticeSpec& lattice);

/// U^dagger H_int U for an interferometer at phi = pi/4. The result carries the
/// AsymmetricDimer(mu = -(delta+gamma), nu = -(delta-gamma)) metadata.
/// Throws std::invalid_argument for other centers, std::domain_error for phi != pi/4.
HamiltonianMatrix alpha_beta_rotation(const HamiltonianMatrix& H_int);

/// S = diag(1 on left lead and alpha, sqrt(nu/mu) on beta and right lead),
/// principal branch.
BasisChange biorthogonal_basis(const LatticeSpec& lattice, DimerParams params);

/// S^{-1} H S for a site-basis AsymmetricDimer Hamiltonian. The alpha-beta
/// coupling becomes -mu*sqrt(nu/mu) in both directions.
/// Throws std::invalid_argument for mu = 0 or nu = 0 or a wrong center.
HamiltonianMatrix biorthogonal_scale(const HamiltonianMatrix& H_eq);

struct BlockDecomposition {
    Matrix h_plus;   // symmetric combinations, end site last
    Matrix h_minus;  // antisymmetric combinations, end site last
    // Full-lattice index pairs (left-side index, mirror index) for each block row.
    std::vector<std::pair<int, int>> embedding;
    BasisChange basis;  // columns: symmetric vectors, then antisymmetric
    cplx plus_end_potential{0.0, 0.0};
    cplx minus_end_potential{0.0, 0.0};
    double off_block_max{0.0};

    /// h_plus (or h_minus) placed back in the full lattice basis.
    Matrix embedded_plus() const;
    Matrix embedded_minus() const;
};

/// Mirror-parity split of a biorthogonally scaled dimer at mu*nu = -1 with equal
/// lead lengths. Throws std::invalid_argument when the preconditions fail.
BlockDecomposition parity_decompose(const HamiltonianMatrix& h_eq, double tol = kClassifyTol);

// ------------------------------ spectral tools -----------------------------

/// Eigenvalues sorted by (Re, Im).
std::vector<cplx> sorted_eigenvalues(const Matrix& m);

/// Largest distance between matched eigenvalues: both lists sorted by (Re, Im),
/// then each eigenvalue is paired with its nearest unused partner so that
/// near-ties in the real part cannot swap the pairing. Infinity on size mismatch.
double spectral_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

double frobenius(const Matrix& m);
double max_abs(const Matrix& m);
/// ||H - H^dagger||_F
double hermiticity_defect(const Matrix& m);

}  // namespace nhscat
