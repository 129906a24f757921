// SPDX-License-Identifier: Apache-2.0
//
// Comparison curves: element-wise alternating optimization, fixed-phase
// SIMs, and a conventional MIMO link without metasurfaces.

#pragma once

#include <cstdint>

#include "simhmimo/channel.hpp"
#include "simhmimo/objective.hpp"
#include "simhmimo/optimizer.hpp"

namespace simhmimo {

struct AoConfig {
    int phase_grid_points = 32;
    int max_outer_iters = 20;
    double rel_tol = 1e-6;

    void validate() const;
};

/// One outer iteration updates every transmit atom, then every receive atom,
/// each by a 1-D search over its phase, and finally sets Q by capacity
/// water-filling. `inner` has one record per element or Q update; `outer`
/// has one record per sweep. Both carry cumulative multiplication counts
/// from the same counter.
struct AoResult {
    RunTrace outer;
    RunTrace inner;
    OptimPoint point;
    int updates_per_outer = 0;
};

AoResult ao_run(const RateProblem& problem, const OptimPoint& initial, const AoConfig& config);

/// Best phase for one element: grid search plus one parabolic refinement.
/// Never returns a value worse than the current phase. Exposed for tests.
struct ElementUpdate {
    cplx value;
    double f = 0.0;
};
ElementUpdate ao_element_update(const RateProblem& problem, OptimPoint& point, Side side,
                                int layer, int atom, double current_f, int grid_points,
                                OpCounter* counter = nullptr);

enum class PhaseMode { Equal, Random };

/// Phases fixed (all pi/2, or uniform from `seed`), Q by water-filling.
/// Returns bits/s/Hz.
double fixed_phase_rate(PhaseMode mode, const RateProblem& problem, std::uint64_t seed = 0);

/// Antenna-to-antenna i.i.d. Rayleigh channel with the same path-loss model.
/// N_r x N_t, not noise-normalized.
CMatrix draw_direct_channel(int tx_antennas, int rx_antennas, const LinkParams& link,
                            std::uint64_t seed);

/// Water-filling capacity of y = H x + n, in bits/s/Hz.
double digital_precoding_rate(const CMatrix& H, double noise_power, double power_budget);

}  // namespace simhmimo
