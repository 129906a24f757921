// SPDX-License-Identifier: Apache-2.0
//
// Rayleigh-Sommerfeld diffraction between adjacent layers and the SIM
// transfer matrices built from them.

#pragma once

#include <random>
#include <vector>

#include "simhmimo/geometry.hpp"
#include "simhmimo/linalg.hpp"
#include "simhmimo/op_counter.hpp"

namespace simhmimo {

/// Per-layer unit-modulus transmission coefficients of one SIM.
struct PhaseStack {
    Side side = Side::Transmit;
    std::vector<CVector> layers;

    int layer_count() const { return static_cast<int>(layers.size()); }

    /// Every entry set to e^{j theta}.
    static PhaseStack uniform(Side side, int layer_count, int atoms, double theta);
    /// Every phase drawn uniformly from [0, 2 pi).
    static PhaseStack random(Side side, int layer_count, int atoms, std::mt19937_64& rng);

    /// Largest | |entry| - 1 | over all layers.
    double modulus_defect() const;
};

/// Fixed diffraction matrices of one SIM.
///
/// Transmit side: `boundary` is W^1 (atoms x N_t, antennas to the first
/// layer) and `inner[i]` is W^{i+2} (atoms x atoms). Receive side: `boundary`
/// is U^1 (N_r x atoms, last layer to antennas) and `inner[i]` is U^{i+2}.
struct TransferChain {
    Side side = Side::Transmit;
    CMatrix boundary;
    std::vector<CMatrix> inner;

    int layer_count() const { return static_cast<int>(inner.size()) + 1; }
    int atoms() const;
    int antennas() const;

    /// Diffraction matrix of layer l (1-based): l == 1 is the boundary.
    const CMatrix& layer(int l) const { return l == 1 ? boundary : inner[l - 2]; }
};

/// (A cos chi / r) (1/(2 pi r) - j/lambda) e^{j 2 pi r / lambda}, cos chi = gap / r.
cplx rs_coefficient(double area, double axial_gap, double distance, double wavelength);

TransferChain build_transfer_chain(const SimGeometry& geometry, Side side);

/// P = Phi^L W^L ... Phi^1 W^1 (atoms x N_t).
CMatrix sim_transmit_matrix(const TransferChain& chain, const PhaseStack& phases,
                            OpCounter* counter = nullptr);

/// Z = U^1 Psi^1 U^2 Psi^2 ... U^K Psi^K (N_r x atoms).
CMatrix sim_receive_matrix(const TransferChain& chain, const PhaseStack& phases,
                           OpCounter* counter = nullptr);

/// Throws std::invalid_argument if the stack does not fit the chain.
void check_conformable(const TransferChain& chain, const PhaseStack& phases);

}  // namespace simhmimo
