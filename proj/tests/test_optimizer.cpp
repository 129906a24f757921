// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "simhmimo/optimizer.hpp"

using namespace simhmimo;

TEST_CASE("config validation") {
    OptimizerConfig c;
    CHECK_NOTHROW(c.validate());
    c.shrink = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.step_base[1] = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.sufficient_increase[2] = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.min_step = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("projected step") {
    const RateProblem p = fixture::desk_problem(3, 2, 2, 31);
    std::mt19937_64 rng(1);
    const OptimPoint x = fixture::random_point(p, rng);
    const RateGradient g = gradient(p, x);

    SUBCASE("zero step or zero gradient leaves the point unchanged") {
        CHECK(point_distance_sq(pga_step(p, x, g, {0.0, 0.0, 0.0}), x) < 1e-28);
        RateGradient zero = g;
        zero.grad_Q.setZero();
        for (auto& v : zero.grad_phi) v.setZero();
        for (auto& v : zero.grad_psi) v.setZero();
        CHECK(point_distance_sq(pga_step(p, x, zero, {1.0, 1.0, 1.0}), x) < 1e-28);
    }
    SUBCASE("a small step increases the rate and stays feasible") {
        const OptimPoint y = pga_step(p, x, g, {1e-6, 1e-3, 1e-3});
        CHECK(rate_nats(p, y) > rate_nats(p, x));
        CHECK_NOTHROW(p.check_feasible(y));
        const OptimPoint big = pga_step(p, x, g, {1e3, 1e3, 1e3});
        CHECK_NOTHROW(p.check_feasible(big));
    }
    SUBCASE("families move independently") {
        const OptimPoint only_q = pga_step(p, x, g, {1e-6, 0.0, 0.0});
        const StepTriple moved = step_lengths_sq(only_q, x);
        CHECK(moved[0] > 0.0);
        CHECK(moved[1] < 1e-28);  // renormalization only
        CHECK(moved[2] < 1e-28);
    }
}

TEST_CASE("backtracking") {
    CHECK(max_backtrack_exponent(1e4, 0.5, 1e-4) == 27);
    CHECK(max_backtrack_exponent(1e4, 0.5, 1e-4) ==
          static_cast<int>(std::ceil(std::log(1e-4 / 1e4) / std::log(0.5))));
    CHECK(max_backtrack_exponent(1.0, 0.5, 2.0) == 0);

    const RateProblem p = fixture::desk_problem(3, 2, 2, 32);
    const OptimPoint x = p.default_start();
    const Evaluation at = evaluate(p, x);
    const RateGradient g = gradient(p, x, at);
    for (bool per_variable : {false, true}) {
        OptimizerConfig cfg;
        cfg.per_variable_search = per_variable;
        const ArmijoOutcome out = armijo_search(p, x, at, g, cfg);
        REQUIRE_FALSE(out.stalled);
        const StepTriple d = step_lengths_sq(out.point, x);
        CHECK(out.evaluation.f >= at.f + 1e-5 * (d[0] + d[1] + d[2]));
        for (int q = 0; q < 3; ++q)
            CHECK(out.steps[q] == doctest::Approx(1e4 * std::pow(0.5, out.exponents[q])));
    }

    SUBCASE("a tiny base step is accepted at once") {
        OptimizerConfig cfg;
        cfg.per_variable_search = false;
        cfg.step_base = {1e-6, 1e-4, 1e-4};
        cfg.min_step = 1e-9;
        const ArmijoOutcome out = armijo_search(p, x, at, g, cfg);
        CHECK(out.exponents == ExponentTriple{0, 0, 0});
    }
    SUBCASE("no admissible step stalls") {
        OptimizerConfig cfg;
        cfg.sufficient_increase = {1e12, 1e12, 1e12};
        const ArmijoOutcome out = armijo_search(p, x, at, g, cfg);
        CHECK(out.stalled);
        CHECK(point_distance_sq(out.point, x) == 0.0);
    }
}

TEST_CASE("runs") {
    const RateProblem p = fixture::desk_problem(3, 2, 2, 33);
    SUBCASE("no iterations") {
        OptimizerConfig cfg;
        cfg.max_iters = 0;
        const RunResult r = run(p, p.default_start(), cfg);
        CHECK(r.trace.records.empty());
        CHECK(point_distance_sq(r.point, p.default_start()) == 0.0);
    }
    SUBCASE("infeasible start") {
        OptimPoint x = p.default_start();
        x.Q *= 3.0;
        CHECK_THROWS_AS(run(p, x, OptimizerConfig{}), std::invalid_argument);
    }
    SUBCASE("backtracking ascent is monotone, feasible and deterministic") {
        OptimizerConfig cfg;
        cfg.max_iters = 60;
        const RunResult a = run(p, p.default_start(), cfg);
        const RunResult b = run(p, p.default_start(), cfg);
        REQUIRE(a.trace.records.size() == b.trace.records.size());
        double prev = a.trace.initial_f;
        std::int64_t mults = 0;
        for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
            const IterationRecord& rec = a.trace.records[i];
            CHECK(rec.f_nats >= prev - 1e-12);
            CHECK(rec.cumulative_mults > mults);
            CHECK(rec.f_nats == b.trace.records[i].f_nats);
            prev = rec.f_nats;
            mults = rec.cumulative_mults;
        }
        CHECK_NOTHROW(p.check_feasible(a.point));
        CHECK(a.point.Q.trace().real() <= p.power_budget + 1e-9);
        CHECK(a.point.tx.modulus_defect() < 1e-12);
        CHECK(a.trace.records.back().f_nats == doctest::Approx(rate_nats(p, a.point)));
        CHECK(a.trace.critical_residual >= 0.0);
    }
    SUBCASE("fixed step") {
        OptimizerConfig cfg;
        cfg.mode = StepMode::FixedStep;
        cfg.max_iters = 40;
        const RunResult r = run(p, p.default_start(), cfg);
        CHECK(r.trace.lipschitz == doctest::Approx(lipschitz_constant(p).lambda));
        CHECK(r.trace.records.front().steps[0] == doctest::Approx(1.0 / r.trace.lipschitz));
        CHECK_NOTHROW(p.check_feasible(r.point));
    }
}
