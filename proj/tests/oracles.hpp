// Independent reference computations used only by the tests. None of these
// call into the closed-form amplitude code or the library propagator.
#pragma once

#include "nhscat/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using nhscat::cplx;
using nhscat::Matrix;
using nhscat::Vector;

struct LinearSolveAmplitudes {
    double T{0.0};
    double R{0.0};
    cplx r{0.0, 0.0};
};

// Solve (H + Sigma - E) psi = s on the truncated lattice, where Sigma = -e^{ik}
// on both end sites makes the ends perfectly outgoing and s injects a unit wave
// e^{ikj} (left) or e^{-ikj} (right) through the end row. R and T are read off
// the far lead region of the incidence side and the opposite lead.
inline LinearSolveAmplitudes linear_solve(const nhscat::HamiltonianMatrix& H, double k, bool from_left) {
    const nhscat::SiteIndex sites = H.sites();
    const int n = H.dim();
    const cplx eik = std::polar(1.0, k);
    const double E = -2.0 * std::cos(k);

    Matrix A = H.entries - E * Matrix::Identity(n, n);
    A(0, 0) -= eik;
    A(n - 1, n - 1) -= eik;

    // incoming wave, written in the lead coordinate of the injecting end
    Vector s = Vector::Zero(n);
    const int end = from_left ? 0 : n - 1;
    const int x0 = sites.lead_coordinate(end);
    const double dir = from_left ? 1.0 : -1.0;
    auto incoming = [&](int x) { return std::polar(1.0, dir * k * x); };
    const int outside = from_left ? x0 - 1 : x0 + 1;
    s(end) = incoming(outside) - eik * incoming(x0);

    const Vector psi = A.partialPivLu().solve(s);

    // reflected wave: psi_x - incoming(x) = r e^{-i dir k x}; average a few sites
    LinearSolveAmplitudes out;
    cplx r_sum = 0.0;
    const int probes = 5;
    for (int p = 0; p < probes; ++p) {
        const int idx = from_left ? p + 2 : n - 3 - p;
        const int x = sites.lead_coordinate(idx);
        r_sum += (psi(idx) - incoming(x)) * std::polar(1.0, dir * k * x);
    }
    out.r = r_sum / static_cast<double>(probes);
    out.R = std::norm(out.r);

    double t_sum = 0.0;
    for (int p = 0; p < probes; ++p) {
        const int idx = from_left ? n - 3 - p : p + 2;
        t_sum += std::norm(psi(idx));
    }
    out.T = t_sum / probes;
    return out;
}

// psi(t) for every requested time by diagonalizing H once. Only for matrices
// that are safely diagonalizable (no spectral singularity).
inline std::vector<Vector> eigen_evolve(const Matrix& H, const Vector& psi0, const std::vector<double>& times) {
    Eigen::ComplexEigenSolver<Matrix> es(H, true);
    const Matrix V = es.eigenvectors();
    const Vector c = V.partialPivLu().solve(psi0);
    std::vector<Vector> out;
    for (double t : times) {
        const Vector phase = (cplx(0.0, -t) * es.eigenvalues()).array().exp();
        out.push_back(V * phase.cwiseProduct(c));
    }
    return out;
}

// Adaptive Dormand-Prince integration of i dpsi/dt = H psi.
inline Vector ode_evolve(const Matrix& H, const Vector& psi0, double t_end, double tol = 1e-12) {
    using State = std::vector<cplx>;
    namespace ode = boost::numeric::odeint;
    State x(psi0.data(), psi0.data() + psi0.size());
    auto rhs = [&H](const State& y, State& dy, double) {
        Eigen::Map<const Vector> ym(y.data(), static_cast<Eigen::Index>(y.size()));
        Eigen::Map<Vector> dym(dy.data(), static_cast<Eigen::Index>(dy.size()));
        dym.noalias() = cplx(0.0, -1.0) * (H * ym);
    };
    ode::integrate_adaptive(ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>()), rhs, x, 0.0, t_end, 0.05);
    return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

// Total Dirac probability of the mixture (1/N) sum_j |e_j><e_j| at each time,
// as the incoherent sum of individually evolved basis states.
inline std::vector<double> incoherent_total(const Matrix& H, const std::vector<int>& indices, const std::vector<double>& times) {
    Eigen::ComplexEigenSolver<Matrix> es(H, true);
    const Matrix V = es.eigenvectors();
    const Matrix Vinv = V.partialPivLu().inverse();
    std::vector<double> P(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Vector phase = (cplx(0.0, -times[i]) * es.eigenvalues()).array().exp();
        const Matrix Ut = V * phase.asDiagonal() * Vinv;
        for (int j : indices) P[i] += Ut.col(j).squaredNorm();
        P[i] /= static_cast<double>(indices.size());
    }
    return P;
}

}  // namespace oracle
