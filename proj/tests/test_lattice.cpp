#include "nhscat/lattice.hpp"
#include "nhscat/matrix_io.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace nhscat;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<CenterSpec> sample_centers() {
    return {OnSitePotential{0.0}, OnSitePotential{cplx(0.3, -1.7)}, Interferometer{-1.25, 0.75, pi / 4},
            Interferometer{0.75, 1.25, 0.3}, Interferometer{0.4, 0.0, 1.1}, AsymmetricDimer{0.5, 2.0},
            AsymmetricDimer{-2.0, 0.5}, AsymmetricDimer{1.3, 1.3}};
}

}  // namespace

TEST_CASE("site ordering follows the canonical layout") {
    const LatticeSpec l{3, 2};
    CHECK(site_to_index(l, CenterKind::AlphaBeta, SiteLabel::lead(-3)) == 0);
    CHECK(site_to_index(l, CenterKind::AlphaBeta, SiteLabel::alpha()) == 3);
    CHECK(site_to_index(l, CenterKind::AlphaBeta, SiteLabel::beta()) == 4);
    CHECK(site_to_index(l, CenterKind::AlphaBeta, SiteLabel::lead(2)) == 6);
    CHECK(site_to_index(l, CenterKind::Single, SiteLabel::origin()) == 3);
    CHECK(site_to_index(l, CenterKind::PlusMinus, SiteLabel::minus()) == 4);
    CHECK_THROWS_AS(site_to_index(l, CenterKind::AlphaBeta, SiteLabel::lead(3)), std::out_of_range);
    CHECK_THROWS_AS(site_to_index(l, CenterKind::AlphaBeta, SiteLabel::plus()), std::out_of_range);
    CHECK_THROWS_AS(site_to_index(l, CenterKind::Single, SiteLabel::lead(0)), std::out_of_range);
}

TEST_CASE("index map is a bijection for every center kind") {
    for (CenterKind kind : {CenterKind::Single, CenterKind::PlusMinus, CenterKind::AlphaBeta}) {
        for (const LatticeSpec& l : {LatticeSpec{4, 7}, LatticeSpec{1, 1}, LatticeSpec::hard_wall(9, 3, 5)}) {
            const SiteIndex s(l, kind);
            CHECK(s.dim() == l.left_sites() + l.right_len + center_size(kind));
            for (int i = 0; i < s.dim(); ++i) CHECK(s.index(s.label(i)) == i);
        }
    }
}

TEST_CASE("hard wall keeps only n0 left sites") {
    const LatticeSpec l = LatticeSpec::hard_wall(20, 5, 8);
    const SiteIndex s(l, CenterKind::PlusMinus);
    CHECK(s.dim() == 5 + 2 + 8);
    CHECK(s.label(0) == SiteLabel::lead(-5));
    CHECK_THROWS_AS(s.index(SiteLabel::lead(-6)), std::out_of_range);
    CHECK_THROWS(LatticeSpec::hard_wall(20, 0, 8).validate());
    CHECK_THROWS(LatticeSpec{0, 3}.validate());
}

TEST_CASE("interferometer entries match the coupling definitions") {
    const double d = 0.7, g = -0.4, phi = 0.9;
    const auto H = build_hamiltonian(Interferometer{d, g, phi}, LatticeSpec{2, 2});
    const double s2 = std::sqrt(2.0);
    for (int sigma : {+1, -1}) {
        const SiteLabel c = sigma > 0 ? SiteLabel::plus() : SiteLabel::minus();
        CHECK(std::abs(H.at(SiteLabel::lead(-1), c) - (-std::polar(1.0, -sigma * phi) / s2)) < 1e-15);
        CHECK(std::abs(H.at(c, SiteLabel::lead(-1)) - (-std::polar(1.0, sigma * phi) / s2)) < 1e-15);
        CHECK(std::abs(H.at(SiteLabel::lead(1), c) - (-std::polar(1.0, sigma * phi) / s2)) < 1e-15);
        CHECK(std::abs(H.at(c, SiteLabel::lead(1)) - (-std::polar(1.0, -sigma * phi) / s2)) < 1e-15);
    }
    CHECK(H.at(SiteLabel::plus(), SiteLabel::minus()) == cplx(d, 0));
    CHECK(H.at(SiteLabel::minus(), SiteLabel::plus()) == cplx(d, 0));
    CHECK(H.at(SiteLabel::plus(), SiteLabel::plus()) == cplx(0, g));
    CHECK(H.at(SiteLabel::minus(), SiteLabel::minus()) == cplx(0, -g));
    CHECK(H.at(SiteLabel::lead(-2), SiteLabel::lead(-1)) == cplx(-1, 0));
    CHECK(H.at(SiteLabel::lead(-1), SiteLabel::lead(1)) == cplx(0, 0));
}

TEST_CASE("dimer and on-site entries") {
    const auto D = build_hamiltonian(AsymmetricDimer{0.5, 2.0}, LatticeSpec{2, 2});
    CHECK(D.at(SiteLabel::alpha(), SiteLabel::beta()) == cplx(-0.5, 0));
    CHECK(D.at(SiteLabel::beta(), SiteLabel::alpha()) == cplx(-2.0, 0));
    CHECK(D.at(SiteLabel::lead(-1), SiteLabel::alpha()) == cplx(-1, 0));
    CHECK(D.at(SiteLabel::beta(), SiteLabel::lead(1)) == cplx(-1, 0));
    CHECK(D.at(SiteLabel::alpha(), SiteLabel::lead(1)) == cplx(0, 0));

    const auto V = build_hamiltonian(OnSitePotential{cplx(0, 2)}, LatticeSpec{3, 3});
    CHECK(V.at(SiteLabel::origin(), SiteLabel::origin()) == cplx(0, 2));
    CHECK(V.at(SiteLabel::origin(), SiteLabel::lead(1)) == cplx(-1, 0));
}

TEST_CASE("zero potential gives the uniform Hermitian chain") {
    const auto H = build_hamiltonian(OnSitePotential{0.0}, LatticeSpec{5, 4});
    Matrix expected = Matrix::Zero(10, 10);
    for (int i = 0; i + 1 < 10; ++i) expected(i, i + 1) = expected(i + 1, i) = -1.0;
    CHECK((H.entries - expected).norm() == 0.0);
}

TEST_CASE("non-Hermiticity is confined to the center block") {
    for (const auto& c : sample_centers()) {
        const auto H = build_hamiltonian(c, LatticeSpec{4, 5});
        const SiteIndex s = H.sites();
        const Matrix defect = H.entries - H.entries.adjoint();
        for (int i = 0; i < s.dim(); ++i) {
            for (int j = 0; j < s.dim(); ++j) {
                if (s.is_lead_index(i) && s.is_lead_index(j)) CHECK(defect(i, j) == cplx(0, 0));
            }
        }
    }
}

TEST_CASE("Hermitian special cases") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int n = 0; n < 20; ++n) {
        const auto H = build_hamiltonian(Interferometer{u(rng), 0.0, u(rng)}, LatticeSpec{3, 3});
        CHECK((H.entries - H.entries.adjoint()).norm() == doctest::Approx(0.0).epsilon(1e-15));
        const double m = u(rng);
        const auto D = build_hamiltonian(AsymmetricDimer{m, m}, LatticeSpec{3, 3});
        CHECK((D.entries - D.entries.adjoint()).norm() == 0.0);
    }
}

TEST_CASE("interferometer parameter map") {
    auto a = dimer_from_interferometer(-1.25, 0.75);
    CHECK(a.mu == 0.5);
    CHECK(a.nu == 2.0);
    auto b = dimer_from_interferometer(0.75, 1.25);
    CHECK(b.mu == -2.0);
    CHECK(b.nu == 0.5);
    auto c = dimer_from_interferometer(-1.0, 0.0);
    CHECK(c.mu == 1.0);
    CHECK(c.nu == 1.0);
    auto z = dimer_from_interferometer(0.0, 0.0);
    CHECK(z.mu == 0.0);
    CHECK(z.nu == 0.0);

    CHECK(a.is_resonant(kClassifyTol));
    CHECK(b.is_singular(kClassifyTol));
    CHECK_FALSE(DimerParams{3, 5}.is_resonant(kClassifyTol));

    const Interferometer back = interferometer_from_dimer({0.1 * 10, 1.0}, pi / 4);
    const DimerParams round = dimer_from_interferometer(back.delta, back.gamma);
    CHECK(round.mu == doctest::Approx(1.0));
    CHECK(round.nu == doctest::Approx(1.0));
    for (double nu : {0.5, 0.4, 0.1}) {
        const Interferometer i = interferometer_from_dimer({1.0 / nu, nu}, pi / 4);
        CHECK(i.delta * i.delta - i.gamma * i.gamma == doctest::Approx(1.0).epsilon(1e-14));
        const DimerParams p = dimer_from_interferometer(i.delta, i.gamma);
        CHECK(p.nu == doctest::Approx(nu).epsilon(1e-14));
    }
}

TEST_CASE("alpha/beta block is unitary with the stated columns") {
    const Eigen::Matrix2cd U = alpha_beta_block();
    CHECK((U.adjoint() * U - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
    CHECK(std::abs(U(0, 0) - cplx(0.5, 0.5)) < 1e-15);
    CHECK(std::abs(U(1, 0) - cplx(0.5, -0.5)) < 1e-15);
    CHECK(std::abs(U(0, 1) - cplx(0.5, -0.5)) < 1e-15);
    CHECK(std::abs(U(1, 1) - cplx(0.5, 0.5)) < 1e-15);
}

TEST_CASE("validation rejects non-finite parameters") {
    CHECK_THROWS_AS(validate(Interferometer{NAN, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(AsymmetricDimer{1.0, INFINITY}), std::invalid_argument);
    CHECK_THROWS_AS(validate(OnSitePotential{cplx(0.0, NAN)}), std::invalid_argument);
    CHECK_NOTHROW(validate(AsymmetricDimer{0.0, 0.0}));
    CHECK_THROWS(build_hamiltonian(AsymmetricDimer{NAN, 1.0}, LatticeSpec{2, 2}));
}

TEST_CASE("site labels print readably") {
    CHECK(SiteLabel::lead(-4).to_string() == "-4");
    CHECK(SiteLabel::alpha().to_string() == "alpha");
    CHECK(SiteLabel::plus().to_string() == "plus");
}

TEST_CASE("matrix text round trip is lossless") {
    const auto H = build_hamiltonian(Interferometer{0.3, -0.7, 0.123}, LatticeSpec{3, 4});
    std::stringstream io;
    write_matrix(io, H.entries);
    const Matrix back = read_matrix(io);
    CHECK(back.rows() == H.entries.rows());
    CHECK((back - H.entries).norm() == 0.0);
    std::stringstream bad("2 2\n1,0 2,0\n");
    CHECK_THROWS(read_matrix(bad));
}
