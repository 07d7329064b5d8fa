// Closed-form Bethe-ansatz scattering amplitudes for the three
// center types, resonance / spectral-singularity classification, and assembly
// of the corresponding scattering states on a finite lattice.

#pragma once

#include "nhscat/lattice.hpp"

#include <iosfwd>
#include <vector>

namespace nhscat {

enum class Incidence { Left, Right };

/// Incident wave e^{ikx} with k in (0, pi). When the denominator of r and t
/// vanishes (spectral singularity) `divergent` is set, `pole_order` is 1,
/// T and R are +infinity and r, t carry an infinite real part. Downstream
/// code is expected to branch on `divergent`, not on the values.
struct ScatteringAmplitudes {
    double k{0.0};
    Incidence incidence{Incidence::Left};
    cplx r{0.0, 0.0};
    cplx t{0.0, 0.0};
    double T{0.0};
    double R{0.0};
    bool divergent{false};
    int pole_order{0};
};

/// Denominator magnitude below which an amplitude is reported as divergent.
inline constexpr double kPoleTol = 1e-12;

// Left:  r = (1 - mu nu) / (mu nu - e^{-2ik}),  t = nu (1 - e^{-2ik}) / (mu nu - e^{-2ik}).
// Right: same r, nu -> mu in t.
ScatteringAmplitudes dimer_amplitudes(DimerParams params, double k, Incidence incidence);

// t = 2i sin k / (2i sin k - V),  r = V / (2i sin k - V); direction independent.
ScatteringAmplitudes onsite_amplitudes(cplx V, double k, Incidence incidence = Incidence::Left);

/// |t|^2 at resonance (mu nu = 1); equals nu^2 for left incidence at every k.
/// Throws std::domain_error off resonance.
double amplification_coefficient(DimerParams params, double k, Incidence incidence, double tol = kClassifyTol);

struct SingularityReport {
    bool is_resonant{false};
    bool is_singular{false};
    std::vector<double> singular_momenta;
    // |gamma| > 1 with gamma = (nu - mu)/2; only meaningful when (mu, nu) came
    // from an interferometer.
    bool gamma_threshold_met{false};
};

SingularityReport classify(DimerParams params, double tol = kClassifyTol);

enum class Branch { Plus, Minus };

/// f^{+-pi/2}(j) at mu nu = -1: e^{+-i pi j/2} on the left lead, nu e^{-+i pi (j+1)/2}
/// on the right lead, 1 at alpha, nu e^{-+i pi/2} at beta. Throws std::domain_error
/// when mu nu != -1.
cplx singular_wavefunction(DimerParams params, Branch sign, const SiteLabel& site, double tol = kClassifyTol);

/// Amplitudes for whatever center `H` was built from. Interferometers are only
/// solvable at phi = pi/4 (through their dimer reduction).
ScatteringAmplitudes amplitudes_for(const CenterSpec& center, double k, Incidence incidence);

/// The Bethe-ansatz scattering state with momentum k written on every site of
/// the finite lattice of `H` (unit incident amplitude).
Vector scattering_state(const HamiltonianMatrix& H, double k, Incidence incidence);

/// max_i |((H - E) psi)_i| over all rows except the two truncated lead ends.
double lattice_residual(const HamiltonianMatrix& H, const Vector& psi, cplx energy);

inline double dispersion(double k) { return -2.0 * std::cos(k); }

struct SweepRow {
    ScatteringAmplitudes left;
    ScatteringAmplitudes right;
};

/// k_i = i * pi / (samples + 1), i = 1..samples.
std::vector<SweepRow> sweep(const CenterSpec& center, int samples);

/// Columns: k, Re r, Im r, Re t, Im t, T, R. Divergent entries print "inf".
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, Incidence incidence);

}  // namespace nhscat
