// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace simhmimo {

void LinkParams::validate() const {
    if (!(ref_distance > 0.0)) throw std::invalid_argument("link: ref_distance must be > 0");
    if (!(distance >= ref_distance))
        throw std::invalid_argument("link: distance must be >= ref_distance");
    if (!(exponent > 0.0)) throw std::invalid_argument("link: exponent must be > 0");
    if (!(shadow_sigma_db >= 0.0)) throw std::invalid_argument("link: shadow sigma must be >= 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("link: noise_power must be > 0");
    if (!(power_budget >= 0.0)) throw std::invalid_argument("link: power_budget must be >= 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("link: wavelength must be > 0");
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

RMatrix correlation_matrix(const SimGeometry& geometry) {
    const int atoms = geometry.atoms_per_layer();
    RMatrix r(atoms, atoms);
    for (int m = 1; m <= atoms; ++m) {
        r(m - 1, m - 1) = 1.0;
        for (int mt = m + 1; mt <= atoms; ++mt) {
            const double v = sinc(2.0 * intra_surface_distance(m, mt, geometry) / geometry.wavelength);
            r(m - 1, mt - 1) = v;
            r(mt - 1, m - 1) = v;
        }
    }
    return r;
}

PsdSqrt psd_sqrt(const RMatrix& matrix) {
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("psd_sqrt: matrix not square");
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("psd_sqrt: matrix not symmetric");

    Eigen::SelfAdjointEigenSolver<RMatrix> eig(matrix);
    if (eig.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigensolver failed");
    RVector values = eig.eigenvalues();
    PsdSqrt out;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) < 0.0) {
            out.clipped_mass -= values(i);
            values(i) = 0.0;
        }
    }
    const RMatrix& u = eig.eigenvectors();
    out.root = u * values.cwiseSqrt().asDiagonal() * u.transpose();
    return out;
}

double path_loss_db(double distance, double ref_distance, double exponent,
                    double shadow_sigma_db, double wavelength, std::mt19937_64& rng) {
    if (!(ref_distance > 0.0)) throw std::invalid_argument("path_loss_db: ref_distance must be > 0");
    if (distance < ref_distance)
        throw std::invalid_argument("path_loss_db: distance below reference distance");
    const double free_space = 20.0 * std::log10(4.0 * kPi * ref_distance / wavelength);
    double shadow = 0.0;
    if (shadow_sigma_db > 0.0) {
        std::normal_distribution<double> normal(0.0, shadow_sigma_db);
        shadow = normal(rng);
    }
    return free_space + 10.0 * exponent * std::log10(distance / ref_distance) + shadow;
}

ChannelSampler::ChannelSampler(const SimGeometry& tx, const SimGeometry& rx, const LinkParams& link)
    : link_(link) {
    tx.validate();
    rx.validate();
    link.validate();
    tx_sqrt_ = psd_sqrt(correlation_matrix(tx)).root;
    rx_sqrt_ = psd_sqrt(correlation_matrix(rx)).root;
}

ChannelRealization ChannelSampler::draw(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    ChannelRealization out;
    out.seed = seed;
    out.noise_power = link_.noise_power;
    // Shadowing is drawn first so that realizations with the same seed share
    // their large-scale fading across geometries of different size.
    out.pathloss_db = path_loss_db(link_.distance, link_.ref_distance, link_.exponent,
                                   link_.shadow_sigma_db, link_.wavelength, rng);
    out.pathloss_linear = db_to_linear(-out.pathloss_db);

    const Eigen::Index n = rx_sqrt_.rows();
    const Eigen::Index m = tx_sqrt_.rows();
    std::normal_distribution<double> normal(0.0, std::sqrt(out.pathloss_linear / 2.0));
    CMatrix iid(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            iid(i, j) = cplx(re, im);
        }
    out.G = rx_sqrt_.cast<cplx>() * iid * tx_sqrt_.cast<cplx>();
    out.corr_tx_sqrt = tx_sqrt_;
    out.corr_rx_sqrt = rx_sqrt_;
    return out;
}

ChannelRealization draw_channel(const SimGeometry& tx, const SimGeometry& rx,
                                const LinkParams& link, std::uint64_t seed) {
    return ChannelSampler(tx, rx, link).draw(seed);
}

EffectiveChannel effective_channel(const CMatrix& Z, const CMatrix& G, const CMatrix& P,
                                   double noise_power) {
    if (Z.cols() != G.rows() || G.cols() != P.rows())
        throw std::invalid_argument("effective_channel: dimension mismatch");
    if (!(noise_power > 0.0)) throw std::invalid_argument("effective_channel: noise_power must be > 0");
    EffectiveChannel out;
    out.H = Z * G * P;
    out.H_bar = out.H / std::sqrt(noise_power);
    return out;
}

}  // namespace simhmimo
