// SPDX-License-Identifier: Apache-2.0
//
// Simultaneous projected gradient ascent over (Q, phi_l, psi_k), with either a
// fixed step below 1/Lambda or Armijo-Goldstein backtracking.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "simhmimo/objective.hpp"
#include "simhmimo/op_counter.hpp"

namespace simhmimo {

enum class StepMode { FixedStep, Backtracking };

/// Index 0 is Q, 1 the transmit phases, 2 the receive phases.
using StepTriple = std::array<double, 3>;
using ExponentTriple = std::array<int, 3>;

struct OptimizerConfig {
    StepMode mode = StepMode::Backtracking;
    StepTriple step_base{1e4, 1e4, 1e4};           // L_0^q
    double shrink = 0.5;                            // rho
    StepTriple sufficient_increase{1e-5, 1e-5, 1e-5};  // delta^q
    double min_step = 1e-4;
    int max_iters = 100;
    double rel_tol = 1e-6;
    int tol_window = 5;
    // Independent exponents per variable family. The families have gradient
    // scales orders of magnitude apart, so a shared exponent lets the
    // stiffest family throttle the others.
    bool per_variable_search = true;
    /// FixedStep uses mu = fixed_step_scale / Lambda on every variable.
    double fixed_step_scale = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class RunStatus { MaxIterations, Converged, Stalled };

struct IterationRecord {
    int iteration = 0;
    double f_nats = 0.0;
    double rate_bits = 0.0;
    StepTriple steps{0.0, 0.0, 0.0};
    ExponentTriple backtracks{0, 0, 0};
    std::int64_t cumulative_mults = 0;
};

struct RunTrace {
    double initial_f = 0.0;
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::MaxIterations;
    /// ||P(x + mu grad) - x|| at the final point with the last step sizes.
    double critical_residual = 0.0;
    double lipschitz = 0.0;  // set in FixedStep mode
};

struct RunResult {
    RunTrace trace;
    OptimPoint point;
};

/// One simultaneous projected step of every variable family from the same
/// gradient.
OptimPoint pga_step(const RateProblem& problem, const OptimPoint& point,
                    const RateGradient& grad, const StepTriple& steps,
                    OpCounter* counter = nullptr);

struct ArmijoOutcome {
    OptimPoint point;
    Evaluation evaluation;  // at `point`
    StepTriple steps{0.0, 0.0, 0.0};
    ExponentTriple exponents{0, 0, 0};
    bool stalled = false;
};

/// Largest exponent tried: the first one whose step drops below min_step.
int max_backtrack_exponent(double step_base, double shrink, double min_step);

/// Backtracking on mu^q = L_0^q rho^kappa until
/// f(new) >= f(old) + sum_q delta^q ||Delta_q||^2.
ArmijoOutcome armijo_search(const RateProblem& problem, const OptimPoint& point,
                            const Evaluation& at, const RateGradient& grad,
                            const OptimizerConfig& config, OpCounter* counter = nullptr);

/// Squared step lengths (||dQ||^2, sum_l ||dphi_l||^2, sum_k ||dpsi_k||^2).
StepTriple step_lengths_sq(const OptimPoint& a, const OptimPoint& b);

RunResult run(const RateProblem& problem, const OptimPoint& initial,
              const OptimizerConfig& config);

}  // namespace simhmimo
