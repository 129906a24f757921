// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace simhmimo {

PhaseStack PhaseStack::uniform(Side side, int layer_count, int atoms, double theta) {
    PhaseStack stack;
    stack.side = side;
    stack.layers.assign(layer_count, CVector::Constant(atoms, std::polar(1.0, theta)));
    return stack;
}

PhaseStack PhaseStack::random(Side side, int layer_count, int atoms, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    PhaseStack stack;
    stack.side = side;
    stack.layers.resize(layer_count);
    for (auto& layer : stack.layers) {
        layer.resize(atoms);
        for (int m = 0; m < atoms; ++m) layer(m) = std::polar(1.0, angle(rng));
    }
    return stack;
}

double PhaseStack::modulus_defect() const {
    double worst = 0.0;
    for (const auto& layer : layers)
        for (Eigen::Index m = 0; m < layer.size(); ++m)
            worst = std::max(worst, std::abs(std::abs(layer(m)) - 1.0));
    return worst;
}

int TransferChain::atoms() const {
    return static_cast<int>(side == Side::Transmit ? boundary.rows() : boundary.cols());
}

int TransferChain::antennas() const {
    return static_cast<int>(side == Side::Transmit ? boundary.cols() : boundary.rows());
}

cplx rs_coefficient(double area, double axial_gap, double distance, double wavelength) {
    if (!(distance > 0.0)) throw std::domain_error("rs_coefficient: distance must be > 0");
    if (!(axial_gap > 0.0) || axial_gap > distance * (1.0 + 1e-12))
        throw std::domain_error("rs_coefficient: need 0 < axial_gap <= distance");
    if (!(wavelength > 0.0)) throw std::domain_error("rs_coefficient: wavelength must be > 0");
    const double cos_chi = axial_gap / distance;
    const cplx radial(1.0 / (2.0 * kPi * distance), -1.0 / wavelength);
    return (area * cos_chi / distance) * radial * std::polar(1.0, 2.0 * kPi * distance / wavelength);
}

TransferChain build_transfer_chain(const SimGeometry& geometry, Side side) {
    geometry.validate();
    const int atoms = geometry.atoms_per_layer();
    const int antennas = geometry.antenna_count;
    const double gap = geometry.layer_spacing();
    const double area = geometry.element_area;
    const double lambda = geometry.wavelength;

    TransferChain chain;
    chain.side = side;
    if (side == Side::Transmit) {
        chain.boundary.resize(atoms, antennas);
        for (int m = 1; m <= atoms; ++m)
            for (int s = 1; s <= antennas; ++s)
                chain.boundary(m - 1, s - 1) = rs_coefficient(
                    area, gap, antenna_to_surface_distance(s, m, geometry, side), lambda);
    } else {
        chain.boundary.resize(antennas, atoms);
        for (int s = 1; s <= antennas; ++s)
            for (int n = 1; n <= atoms; ++n)
                chain.boundary(s - 1, n - 1) = rs_coefficient(
                    area, gap, antenna_to_surface_distance(s, n, geometry, side), lambda);
    }

    if (geometry.layer_count > 1) {
        // Every inter-layer hop has the same gap, so the matrix is shared.
        CMatrix hop(atoms, atoms);
        for (int m = 1; m <= atoms; ++m)
            for (int mt = m; mt <= atoms; ++mt) {
                const cplx w = rs_coefficient(area, gap, inter_layer_distance(m, mt, geometry), lambda);
                hop(m - 1, mt - 1) = w;
                hop(mt - 1, m - 1) = w;
            }
        chain.inner.assign(geometry.layer_count - 1, hop);
    }
    return chain;
}

void check_conformable(const TransferChain& chain, const PhaseStack& phases) {
    if (phases.side != chain.side)
        throw std::invalid_argument("phase stack side does not match transfer chain");
    if (phases.layer_count() != chain.layer_count())
        throw std::invalid_argument("phase stack has " + std::to_string(phases.layer_count()) +
                                    " layers, chain has " + std::to_string(chain.layer_count()));
    for (const auto& layer : phases.layers)
        if (layer.size() != chain.atoms())
            throw std::invalid_argument("phase layer length does not match atoms per layer");
}

CMatrix sim_transmit_matrix(const TransferChain& chain, const PhaseStack& phases,
                            OpCounter* counter) {
    check_conformable(chain, phases);
    const Eigen::Index atoms = chain.atoms();
    const Eigen::Index antennas = chain.antennas();
    CMatrix product = phases.layers[0].asDiagonal() * chain.boundary;
    count(counter, atoms * antennas);
    for (int l = 2; l <= chain.layer_count(); ++l) {
        product = phases.layers[l - 1].asDiagonal() * (chain.layer(l) * product);
        count_product(counter, atoms, atoms, antennas);
        count(counter, atoms * antennas);
    }
    return product;
}

CMatrix sim_receive_matrix(const TransferChain& chain, const PhaseStack& phases,
                           OpCounter* counter) {
    check_conformable(chain, phases);
    const Eigen::Index atoms = chain.atoms();
    const Eigen::Index antennas = chain.antennas();
    CMatrix product = chain.boundary * phases.layers[0].asDiagonal();
    count(counter, atoms * antennas);
    for (int k = 2; k <= chain.layer_count(); ++k) {
        product = (product * chain.layer(k)) * phases.layers[k - 1].asDiagonal();
        count_product(counter, antennas, atoms, atoms);
        count(counter, atoms * antennas);
    }
    return product;
}

}  // namespace simhmimo
