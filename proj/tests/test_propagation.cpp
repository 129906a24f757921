// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "simhmimo/propagation.hpp"

using namespace simhmimo;

namespace {

// Written from the diffraction formula with explicit real arithmetic.
std::complex<long double> rs_oracle(long double area, long double gap, long double r, long double lambda) {
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double amp = area * (gap / r) / r;
    const long double re = 1.0L / (2.0L * pi * r), im = -1.0L / lambda;
    const long double ph = 2.0L * pi * r / lambda;
    const long double c = std::cos(ph), s = std::sin(ph);
    return {amp * (re * c - im * s), amp * (re * s + im * c)};
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("diffraction coefficient") {
    const double area = 0.025 * 0.025, lambda = 0.05;
    SUBCASE("modulus") {
        for (double r : {0.006, 0.02, 0.05, 0.3}) {
            const double gap = 0.005;
            const cplx w = rs_coefficient(area, gap, r, lambda);
            const double expected = area * gap / (r * r) *
                                    std::sqrt(1.0 / std::pow(2 * kPi * r, 2) + 1.0 / (lambda * lambda));
            CHECK(std::abs(w) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("a full-wavelength path adds no phase") {
        const cplx w = rs_coefficient(area, lambda, lambda, lambda);
        const cplx expected = area / lambda * cplx(1.0 / (2 * kPi * lambda), -1.0 / lambda);
        CHECK(std::abs(w - expected) < 1e-12 * std::abs(expected));
    }
    SUBCASE("axial hop") {
        const double d = 0.04 / 7;
        const auto ref = rs_oracle(area, d, d, lambda);
        const cplx w = rs_coefficient(area, d, d, lambda);
        CHECK(w.real() == doctest::Approx(static_cast<double>(ref.real())).epsilon(1e-12));
        CHECK(w.imag() == doctest::Approx(static_cast<double>(ref.imag())).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rs_coefficient(area, 0.01, 0.0, lambda), std::domain_error);
    CHECK_THROWS_AS(rs_coefficient(area, 0.02, 0.01, lambda), std::domain_error);
}

TEST_CASE("transfer chain") {
    const SimGeometry g = SimGeometry::square(3, 3, 0.025, 0.04, 2, 0.05);
    const TransferChain tx = build_transfer_chain(g, Side::Transmit);
    const TransferChain rx = build_transfer_chain(g, Side::Receive);
    CHECK(tx.layer_count() == 3);
    CHECK(tx.atoms() == 9);
    CHECK(tx.antennas() == 2);
    CHECK(tx.boundary.rows() == 9);
    CHECK(tx.boundary.cols() == 2);
    CHECK(rx.boundary.rows() == 2);
    CHECK(rx.boundary.cols() == 9);

    SUBCASE("inner matrices are symmetric and match an entry-wise oracle") {
        const double d = g.layer_spacing();
        for (int l = 2; l <= 3; ++l) {
            const CMatrix& w = tx.layer(l);
            CHECK(max_abs_diff(w, w.transpose()) == 0.0);
            long double frob = 0;
            for (int m = 1; m <= 9; ++m)
                for (int mt = 1; mt <= 9; ++mt) {
                    const LatticeIndex a = atom_plane_indices(m, 3), b = atom_plane_indices(mt, 3);
                    const long double r2 = 0.025L * 0.025L * ((a.x - b.x) * (a.x - b.x) + (a.z - b.z) * (a.z - b.z));
                    frob += std::norm(rs_oracle(g.element_area, d, std::sqrt(r2 + d * d), 0.05L));
                }
            CHECK(w.norm() == doctest::Approx(static_cast<double>(std::sqrt(frob))).epsilon(1e-12));
        }
    }
    SUBCASE("single layer has no inner matrices") {
        const TransferChain one = build_transfer_chain(SimGeometry::square(3, 1, 0.025, 0.04, 2, 0.05), Side::Transmit);
        CHECK(one.layer_count() == 1);
        CHECK(one.inner.empty());
    }
}

TEST_CASE("SIM matrices") {
    std::mt19937_64 rng(11);
    SUBCASE("zero phases and one layer reproduce the boundary matrix") {
        const SimGeometry g = SimGeometry::square(3, 1, 0.025, 0.04, 2, 0.05);
        const TransferChain tx = build_transfer_chain(g, Side::Transmit);
        const TransferChain rx = build_transfer_chain(g, Side::Receive);
        CHECK(max_abs_diff(sim_transmit_matrix(tx, PhaseStack::uniform(Side::Transmit, 1, 9, 0.0)), tx.boundary) == 0.0);
        CHECK(max_abs_diff(sim_receive_matrix(rx, PhaseStack::uniform(Side::Receive, 1, 9, 0.0)), rx.boundary) == 0.0);

        const CMatrix p0 = sim_transmit_matrix(tx, PhaseStack::uniform(Side::Transmit, 1, 9, 0.3));
        const CMatrix p1 = sim_transmit_matrix(tx, PhaseStack::uniform(Side::Transmit, 1, 9, 1.1));
        CHECK(max_abs_diff(p0.cwiseAbs().cast<cplx>(), p1.cwiseAbs().cast<cplx>()) < 1e-15);

        const double s0 = spectral_norm(rx.boundary);
        for (int t = 0; t < 5; ++t)
            CHECK(spectral_norm(sim_receive_matrix(rx, PhaseStack::random(Side::Receive, 1, 9, rng))) ==
                  doctest::Approx(s0).epsilon(1e-12));
    }
    SUBCASE("two-layer stacks against dense products") {
        const SimGeometry g = SimGeometry::square(2, 2, 0.025, 0.04, 2, 0.05);
        const TransferChain tx = build_transfer_chain(g, Side::Transmit);
        const TransferChain rx = build_transfer_chain(g, Side::Receive);
        const PhaseStack phi = PhaseStack::random(Side::Transmit, 2, 4, rng);
        const PhaseStack psi = PhaseStack::random(Side::Receive, 2, 4, rng);
        CHECK(max_abs_diff(sim_transmit_matrix(tx, phi), oracle::to_eigen(oracle::transmit_product(tx, phi))) < 1e-15);
        CHECK(max_abs_diff(sim_receive_matrix(rx, psi), oracle::to_eigen(oracle::receive_product(rx, psi))) < 1e-15);
    }
    SUBCASE("mismatched stacks are rejected") {
        const SimGeometry g = SimGeometry::square(2, 2, 0.025, 0.04, 2, 0.05);
        const TransferChain tx = build_transfer_chain(g, Side::Transmit);
        CHECK_THROWS_AS(sim_transmit_matrix(tx, PhaseStack::uniform(Side::Transmit, 1, 4, 0.0)), std::invalid_argument);
        CHECK_THROWS_AS(sim_transmit_matrix(tx, PhaseStack::uniform(Side::Transmit, 2, 5, 0.0)), std::invalid_argument);
        CHECK_THROWS_AS(sim_transmit_matrix(tx, PhaseStack::uniform(Side::Receive, 2, 4, 0.0)), std::invalid_argument);
    }
    SUBCASE("phase stacks stay on the unit circle") {
        CHECK(PhaseStack::random(Side::Transmit, 3, 16, rng).modulus_defect() < 1e-15);
        CHECK(PhaseStack::uniform(Side::Receive, 3, 16, kPi / 2).modulus_defect() < 1e-15);
    }
}
