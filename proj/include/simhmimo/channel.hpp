// SPDX-License-Identifier: Apache-2.0
//
// Spatially correlated Rayleigh channel between the two SIMs, log-distance
// path loss with shadowing, and the end-to-end effective channel.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "simhmimo/geometry.hpp"
#include "simhmimo/linalg.hpp"

namespace simhmimo {

/// Large-scale link budget. All values SI (meters, watts).
struct LinkParams {
    double distance = 250.0;
    double ref_distance = 1.0;
    double exponent = 3.5;
    double shadow_sigma_db = 9.0;
    double noise_power = 1e-14;   // -110 dBm
    double power_budget = 0.1;    // 20 dBm
    double wavelength = 0.05;

    void validate() const;
};

struct ChannelRealization {
    CMatrix G;              // N x M
    RMatrix corr_tx_sqrt;   // M x M
    RMatrix corr_rx_sqrt;   // N x N
    double pathloss_db = 0.0;
    double pathloss_linear = 1.0;
    double noise_power = 1.0;
    std::uint64_t seed = 0;
};

struct EffectiveChannel {
    CMatrix H;      // N_r x N_t
    CMatrix H_bar;  // H / sqrt(N_0)
};

struct PsdSqrt {
    RMatrix root;
    double clipped_mass = 0.0;  // |sum of negative eigenvalues| set to zero
};

/// sin(pi x) / (pi x), 1 at x = 0.
double sinc(double x);

/// [R]_{m,m'} = sinc(2 r_{m,m'} / lambda) over one layer.
RMatrix correlation_matrix(const SimGeometry& geometry);

/// Symmetric square root with negative eigenvalues clipped to zero.
/// Throws std::invalid_argument on a non-symmetric input.
PsdSqrt psd_sqrt(const RMatrix& matrix);

/// PL(d) in dB: free-space loss at d_0, log-distance slope, one shadowing draw.
double path_loss_db(double distance, double ref_distance, double exponent,
                    double shadow_sigma_db, double wavelength, std::mt19937_64& rng);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Draws G = R_R^{1/2} G~ R_T^{1/2} for fixed geometries. The correlation
/// roots are computed once; each draw is a pure function of its seed.
class ChannelSampler {
public:
    ChannelSampler(const SimGeometry& tx, const SimGeometry& rx, const LinkParams& link);

    ChannelRealization draw(std::uint64_t seed) const;

    const RMatrix& corr_tx_sqrt() const { return tx_sqrt_; }
    const RMatrix& corr_rx_sqrt() const { return rx_sqrt_; }

private:
    LinkParams link_;
    RMatrix tx_sqrt_;
    RMatrix rx_sqrt_;
};

ChannelRealization draw_channel(const SimGeometry& tx, const SimGeometry& rx,
                                const LinkParams& link, std::uint64_t seed);

/// H = Z G P and H_bar = H / sqrt(N_0).
EffectiveChannel effective_channel(const CMatrix& Z, const CMatrix& G, const CMatrix& P,
                                   double noise_power);

}  // namespace simhmimo
