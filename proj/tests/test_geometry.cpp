// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "simhmimo/geometry.hpp"

using namespace simhmimo;

namespace {

SimGeometry full_layout() { return SimGeometry::square(10, 7, 0.025, 0.04, 10, 0.05); }

// Atom m sits at column (m-1) mod side, row floor((m-1)/side), measured from
// the lattice corner. Antenna s sits on the broadside axis, stacked along z.
struct Point3 {
    double x, y, z;
};

Point3 atom_position(int m, const SimGeometry& g) {
    const int col = (m - 1) % g.side_count;
    const int row = (m - 1) / g.side_count;
    const double half = (g.side_count - 1) / 2.0;
    return {(col - half) * g.element_spacing, 0.0, (row - half) * g.element_spacing};
}

Point3 antenna_position(int s, const SimGeometry& g) {
    const double half = (g.antenna_count - 1) / 2.0;
    return {0.0, -g.thickness / g.layer_count, (s - 1 - half) * g.wavelength / 2.0};
}

double dist(const Point3& a, const Point3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

}  // namespace

TEST_CASE("lattice indices") {
    CHECK(atom_plane_indices(1, 10) == LatticeIndex{1, 1});
    CHECK(atom_plane_indices(15, 10) == LatticeIndex{5, 2});
    CHECK(atom_plane_indices(100, 10) == LatticeIndex{10, 10});
    CHECK(atom_plane_indices(10, 10) == LatticeIndex{10, 1});
    CHECK(atom_plane_indices(11, 10) == LatticeIndex{1, 2});
    CHECK_THROWS_AS(atom_plane_indices(0, 10), std::out_of_range);
    CHECK_THROWS_AS(atom_plane_indices(101, 10), std::out_of_range);
}

TEST_CASE("layout invariants") {
    const SimGeometry g = full_layout();
    CHECK(g.atoms_per_layer() == 100);
    CHECK(g.layer_spacing() == doctest::Approx(0.04 / 7));
    CHECK(g.element_area == doctest::Approx(0.025 * 0.025));
    CHECK_THROWS_AS(SimGeometry::square(0, 1, 0.025, 0.04, 1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(SimGeometry::square(3, 0, 0.025, 0.04, 1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(SimGeometry::square(3, 1, -0.1, 0.04, 1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(SimGeometry::square(3, 1, 0.025, 0.04, 0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(SimGeometry::square(3, 1, 0.025, 0.04, 1, 0.0), std::invalid_argument);
}

TEST_CASE("distances within a layer") {
    const SimGeometry g = full_layout();
    CHECK(intra_surface_distance(1, 1, g) == 0.0);
    CHECK(intra_surface_distance(1, 2, g) == doctest::Approx(0.025));
    CHECK(intra_surface_distance(1, 12, g) == doctest::Approx(0.025 * std::sqrt(2.0)));
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(1, 100);
    for (int i = 0; i < 100; ++i) {
        const int a = pick(rng), b = pick(rng);
        CHECK(intra_surface_distance(a, b, g) == doctest::Approx(dist(atom_position(a, g), atom_position(b, g))));
    }
}

TEST_CASE("distances between layers") {
    const SimGeometry g = full_layout();
    const double d = 0.04 / 7;
    CHECK(inter_layer_distance(5, 5, g) == doctest::Approx(d));
    CHECK(inter_layer_distance(1, 2, g) == doctest::Approx(std::sqrt(0.025 * 0.025 + d * d)));
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pick(1, 100);
    for (int i = 0; i < 100; ++i) {
        const int a = pick(rng), b = pick(rng);
        CHECK(inter_layer_distance(a, b, g) == inter_layer_distance(b, a, g));
    }
}

TEST_CASE("antenna to first layer") {
    SUBCASE("centered antenna facing the center atom") {
        const SimGeometry g = SimGeometry::square(3, 2, 0.025, 0.04, 1, 0.05);
        CHECK(antenna_to_surface_distance(1, 5, g, Side::Transmit) == doctest::Approx(0.02));
        CHECK(antenna_to_surface_distance(1, 5, g, Side::Receive) == doctest::Approx(0.02));
    }
    SUBCASE("full-size layout against positions in space") {
        const SimGeometry g = full_layout();
        for (int s = 1; s <= g.antenna_count; ++s)
            for (int m = 1; m <= g.atoms_per_layer(); m += 7)
                CHECK(antenna_to_surface_distance(s, m, g, Side::Transmit) ==
                      doctest::Approx(dist(atom_position(m, g), antenna_position(s, g))).epsilon(1e-12));
        // s = 1, m = 1: vertical (1 - 5.5) 0.025 + 4.5 * 0.025 = 0, horizontal -4.5 * 0.025
        const double d = 0.04 / 7;
        CHECK(antenna_to_surface_distance(1, 1, g, Side::Transmit) ==
              doctest::Approx(std::sqrt(0.1125 * 0.1125 + d * d)));
    }
    SUBCASE("receive side is the transmit side with the column reflected") {
        const SimGeometry g = SimGeometry::square(4, 2, 0.025, 0.04, 3, 0.05);
        for (int s = 1; s <= 3; ++s)
            for (int m = 1; m <= 16; ++m) {
                const LatticeIndex idx = atom_plane_indices(m, 4);
                const int reflected = (idx.z - 1) * 4 + (4 - idx.x) + 1;
                CHECK(antenna_to_surface_distance(s, m, g, Side::Receive) ==
                      doctest::Approx(antenna_to_surface_distance(s, reflected, g, Side::Transmit)));
            }
    }
    SUBCASE("bad antenna index") {
        const SimGeometry g = full_layout();
        CHECK_THROWS_AS(antenna_to_surface_distance(0, 1, g, Side::Transmit), std::out_of_range);
        CHECK_THROWS_AS(antenna_to_surface_distance(11, 1, g, Side::Transmit), std::out_of_range);
    }
}
