// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "simhmimo/projection.hpp"

using namespace simhmimo;

using oracle::dykstra_oracle;
using oracle::simplex_oracle;

TEST_CASE("water-filling projection") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + t % 6;
        RVector sigma(n);
        for (int i = 0; i < n; ++i) sigma(i) = normal(rng);
        const double budget = std::abs(normal(rng));
        const WaterFillingResult w = water_fill_projection(sigma, budget);
        const std::vector<double> ref = simplex_oracle(std::vector<double>(sigma.data(), sigma.data() + n), budget);
        for (int i = 0; i < n; ++i) CHECK(w.allocations(i) == doctest::Approx(ref[i]).epsilon(1e-9).scale(1.0));
        CHECK(w.water_level >= 0.0);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(w.allocations(i) - std::max(sigma(i) - w.water_level, 0.0)) < 1e-12);
        if (w.water_level > 0.0) CHECK(std::abs(w.allocations.sum() - budget) < 1e-9);
    }
    const WaterFillingResult inside = water_fill_projection(RVector::Constant(3, 0.1), 1.0);
    CHECK(inside.water_level == 0.0);
    CHECK(inside.allocations.sum() == doctest::Approx(0.3));
    CHECK_THROWS_AS(water_fill_projection(RVector::Constant(3, 0.1), -1.0), std::invalid_argument);
}

TEST_CASE("covariance projection against alternating projections") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const CMatrix y = oracle::random_hermitian(3, rng);
        const double budget = 0.5 + 0.1 * t;
        const CMatrix q = project_covariance(y, budget);
        CHECK((q - dykstra_oracle(y, budget)).norm() < 1e-6);
    }
}

TEST_CASE("covariance projection is idempotent on feasible points") {
    std::mt19937_64 rng(4);
    const CMatrix q = oracle::random_covariance(4, 0.7, rng);
    CHECK((project_covariance(q, 1.0) - q).norm() < 1e-12);
    CMatrix bad = q;
    bad(0, 1) += cplx(0.1, 0.0);
    CHECK_THROWS_AS(project_covariance(bad, 1.0), std::invalid_argument);
}

TEST_CASE("unit-modulus projection") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    CVector v(6);
    for (int i = 0; i < 6; ++i) v(i) = cplx(normal(rng), normal(rng));
    v(2) = 0.0;
    const CVector u = project_unit_modulus(v);
    CHECK(u(2) == cplx(1.0, 0.0));
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(std::abs(u(i)) - 1.0) < 1e-15);
        if (i == 2) continue;
        double grid_best = 1e300;
        for (int k = 0; k < 10000; ++k)
            grid_best = std::min(grid_best, std::abs(v(i) - std::polar(1.0, 2.0 * kPi * k / 10000.0)));
        CHECK(std::abs(v(i) - u(i)) <= grid_best + 1e-15);
    }
}

TEST_CASE("capacity water-filling") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    for (int t = 0; t < 50; ++t) {
        RVector g(4);
        for (int i = 0; i < 4; ++i) g(i) = unif(rng);
        const double budget = 0.1 + unif(rng);
        const CapacityAllocation a = water_fill_capacity(g, budget);
        CHECK(a.powers.sum() == doctest::Approx(budget).epsilon(1e-12));
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(a.powers(i) - std::max(a.water_level - 1.0 / g(i), 0.0)) < 1e-12);
        }
        // No feasible random split does better.
        for (int k = 0; k < 50; ++k) {
            RVector p(4);
            for (int i = 0; i < 4; ++i) p(i) = unif(rng);
            p *= budget / p.sum();
            double r = 0.0;
            for (int i = 0; i < 4; ++i) r += std::log1p(g(i) * p(i));
            CHECK(r <= a.rate_nats + 1e-12);
        }
    }
    CHECK(water_fill_capacity(RVector::Ones(3), 0.0).rate_nats == 0.0);
}

TEST_CASE("capacity covariance reaches the eigenmode capacity") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    CMatrix h(3, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 3; ++i) h(i, j) = cplx(normal(rng), normal(rng));
    const CMatrix q = capacity_covariance(h, 2.0);
    CHECK(q.trace().real() == doctest::Approx(2.0));
    Eigen::JacobiSVD<CMatrix> svd(h);
    const RVector gains = svd.singularValues().array().square().matrix();
    const double capacity = water_fill_capacity(gains, 2.0).rate_nats;
    CMatrix gram = CMatrix::Identity(3, 3) + h * q * h.adjoint();
    const double f = std::log(gram.determinant().real());
    CHECK(f == doctest::Approx(capacity).epsilon(1e-12));
}
