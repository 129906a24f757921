// SPDX-License-Identifier: Apache-2.0
//
// Achievable-rate objective f = ln det(I + H_bar Q H_bar^H), its gradients
// with respect to the conjugated variables, and the Lipschitz constant of
// the gradient map.

#pragma once

#include <vector>

#include "simhmimo/channel.hpp"
#include "simhmimo/linalg.hpp"
#include "simhmimo/op_counter.hpp"
#include "simhmimo/propagation.hpp"

namespace simhmimo {

/// Optimization variables: transmit covariance and both phase stacks.
struct OptimPoint {
    CMatrix Q;
    PhaseStack tx;
    PhaseStack rx;
};

/// Fixed data of one rate-maximization instance.
struct RateProblem {
    TransferChain tx_chain;
    TransferChain rx_chain;
    CMatrix G;  // N x M, not noise-normalized
    double noise_power = 1.0;
    double power_budget = 1.0;

    int tx_antennas() const { return tx_chain.antennas(); }
    int rx_antennas() const { return rx_chain.antennas(); }

    static RateProblem from(const TransferChain& tx, const TransferChain& rx,
                            const ChannelRealization& channel, double power_budget);

    /// Throws std::invalid_argument if dimensions or constraints are violated
    /// beyond the given tolerance.
    void check_feasible(const OptimPoint& point, double tol = 1e-9) const;

    /// Q = (P / N_t) I and every phase e^{j pi/2}.
    OptimPoint default_start() const;
};

/// Quantities cached at one point; the gradient reuses them.
struct Evaluation {
    CMatrix P;                        // M x N_t
    CMatrix Z;                        // N_r x N
    CMatrix H_bar;                    // N_r x N_t
    std::vector<CMatrix> tx_before;   // W^l Phi^{l-1} ... Phi^1 W^1, l = 1..L
    std::vector<CMatrix> rx_before;   // U^1 Psi^1 ... Psi^{k-1} U^k, k = 1..K
    double f = 0.0;                   // nats
};

struct RateGradient {
    CMatrix grad_Q;
    std::vector<CVector> grad_phi;
    std::vector<CVector> grad_psi;
};

inline double nats_to_bits(double nats) { return nats / 0.69314718055994530942; }

/// ln det(I + H_bar Q H_bar^H) via Cholesky.
double log_det_rate(const CMatrix& H_bar, const CMatrix& Q, OpCounter* counter = nullptr);

/// (I + H_bar Q H_bar^H)^{-1} by solving against the identity.
CMatrix k_matrix(const CMatrix& Q, const CMatrix& H_bar, OpCounter* counter = nullptr);

Evaluation evaluate(const RateProblem& problem, const OptimPoint& point,
                    OpCounter* counter = nullptr);

double rate_nats(const RateProblem& problem, const OptimPoint& point);
inline double rate_bits(const RateProblem& problem, const OptimPoint& point) {
    return nats_to_bits(rate_nats(problem, point));
}

/// Gradients with respect to Q*, phi_l*, psi_k* at the evaluated point.
RateGradient gradient(const RateProblem& problem, const OptimPoint& point,
                      const Evaluation& at, OpCounter* counter = nullptr);
RateGradient gradient(const RateProblem& problem, const OptimPoint& point);

/// Squared Euclidean distance over (Q, all phi_l, all psi_k).
double point_distance_sq(const OptimPoint& a, const OptimPoint& b);
/// Squared Euclidean norm of a gradient difference, same metric.
double gradient_distance_sq(const RateGradient& a, const RateGradient& b);

/// Constants of the gradient Lipschitz bound. a and b_k are replaced by
/// products of the diffraction-matrix spectral norms, which bound every
/// unit-modulus phase choice, so Lambda is constant over a run. The values
/// c = ||H_bar||, d = c ||Z|| and f = ||P|| are bounded the same way.
struct LipschitzBound {
    double a = 0.0;         // prod ||W^l||
    double b_k = 0.0;       // prod ||U^k||
    double b = 0.0;         // ||G||
    double c = 0.0;         // bound on ||H_bar||
    double d_over_c = 0.0;  // bound on ||Z||
    double f = 0.0;         // bound on ||P||
    double lambda_Q = 0.0;
    double lambda_phi = 0.0;
    double lambda_psi = 0.0;
    double lambda = 0.0;
};

LipschitzBound lipschitz_constant(const RateProblem& problem);

}  // namespace simhmimo
