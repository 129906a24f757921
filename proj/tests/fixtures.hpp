// SPDX-License-Identifier: Apache-2.0
//
// Shared instance builders for the tests.

#pragma once

#include <random>

#include "oracles.hpp"
#include "simhmimo/objective.hpp"

namespace fixture {

/// Square SIMs at the default link budget with one channel draw.
inline simhmimo::RateProblem desk_problem(int side, int layers, int antennas, std::uint64_t seed,
                                          int rx_layers = -1) {
    using namespace simhmimo;
    const SimGeometry tx = SimGeometry::square(side, layers, 0.025, 0.04, antennas, 0.05);
    const SimGeometry rx =
        SimGeometry::square(side, rx_layers > 0 ? rx_layers : layers, 0.025, 0.04, antennas, 0.05);
    const LinkParams link;
    return RateProblem::from(build_transfer_chain(tx, Side::Transmit), build_transfer_chain(rx, Side::Receive),
                             draw_channel(tx, rx, link, seed), link.power_budget);
}

/// Feasible point with random phases and a random covariance of trace
/// fraction * P.
inline simhmimo::OptimPoint random_point(const simhmimo::RateProblem& p, std::mt19937_64& rng,
                                         double fraction = 0.5) {
    using namespace simhmimo;
    OptimPoint x;
    x.Q = oracle::random_covariance(p.tx_antennas(), fraction * p.power_budget, rng);
    x.tx = PhaseStack::random(Side::Transmit, p.tx_chain.layer_count(), p.tx_chain.atoms(), rng);
    x.rx = PhaseStack::random(Side::Receive, p.rx_chain.layer_count(), p.rx_chain.atoms(), rng);
    return x;
}

}  // namespace fixture
