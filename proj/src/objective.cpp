// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace simhmimo {

RateProblem RateProblem::from(const TransferChain& tx, const TransferChain& rx,
                              const ChannelRealization& channel, double power_budget) {
    if (tx.side != Side::Transmit || rx.side != Side::Receive)
        throw std::invalid_argument("RateProblem: chains have the wrong sides");
    if (channel.G.rows() != rx.atoms() || channel.G.cols() != tx.atoms())
        throw std::invalid_argument("RateProblem: channel does not match atoms per layer");
    if (!(channel.noise_power > 0.0)) throw std::invalid_argument("RateProblem: noise_power must be > 0");
    if (!(power_budget >= 0.0)) throw std::invalid_argument("RateProblem: power budget must be >= 0");
    RateProblem p;
    p.tx_chain = tx;
    p.rx_chain = rx;
    p.G = channel.G;
    p.noise_power = channel.noise_power;
    p.power_budget = power_budget;
    return p;
}

void RateProblem::check_feasible(const OptimPoint& point, double tol) const {
    const int nt = tx_antennas();
    if (point.Q.rows() != nt || point.Q.cols() != nt)
        throw std::invalid_argument("infeasible point: Q must be N_t x N_t");
    check_conformable(tx_chain, point.tx);
    check_conformable(rx_chain, point.rx);
    if (hermitian_defect(point.Q) > tol) throw std::invalid_argument("infeasible point: Q not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(point.Q), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("infeasible point: Q not positive semidefinite");
    if (point.Q.trace().real() > power_budget + tol)
        throw std::invalid_argument("infeasible point: trace(Q) exceeds the power budget");
    if (point.tx.modulus_defect() > tol || point.rx.modulus_defect() > tol)
        throw std::invalid_argument("infeasible point: phase entries not unit modulus");
}

OptimPoint RateProblem::default_start() const {
    OptimPoint p;
    const int nt = tx_antennas();
    p.Q = CMatrix::Identity(nt, nt) * cplx(power_budget / nt, 0.0);
    p.tx = PhaseStack::uniform(Side::Transmit, tx_chain.layer_count(), tx_chain.atoms(), kPi / 2.0);
    p.rx = PhaseStack::uniform(Side::Receive, rx_chain.layer_count(), rx_chain.atoms(), kPi / 2.0);
    return p;
}

namespace {

Eigen::LLT<CMatrix> gram_cholesky(const CMatrix& H_bar, const CMatrix& Q, OpCounter* counter) {
    const Eigen::Index nr = H_bar.rows();
    const Eigen::Index nt = H_bar.cols();
    const CMatrix hq = H_bar * Q;
    count_product(counter, nr, nt, nt);
    CMatrix gram = CMatrix::Identity(nr, nr) + hq * H_bar.adjoint();
    count_product(counter, nr, nt, nr);
    Eigen::LLT<CMatrix> llt(hermitian_part(gram));
    count(counter, nr * nr * nr / 6);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("I + H Q H^H is not positive definite (Q infeasible?)");
    return llt;
}

double log_det_from(const Eigen::LLT<CMatrix>& llt) {
    double sum = 0.0;
    const CMatrix& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) sum += std::log(l(i, i).real());
    return 2.0 * sum;
}

}  // namespace

double log_det_rate(const CMatrix& H_bar, const CMatrix& Q, OpCounter* counter) {
    return log_det_from(gram_cholesky(H_bar, Q, counter));
}

CMatrix k_matrix(const CMatrix& Q, const CMatrix& H_bar, OpCounter* counter) {
    const auto llt = gram_cholesky(H_bar, Q, counter);
    const Eigen::Index nr = H_bar.rows();
    CMatrix k = llt.solve(CMatrix::Identity(nr, nr));
    count(counter, nr * nr * nr);
    return hermitian_part(k);
}

Evaluation evaluate(const RateProblem& problem, const OptimPoint& point, OpCounter* counter) {
    const auto& tx = problem.tx_chain;
    const auto& rx = problem.rx_chain;
    check_conformable(tx, point.tx);
    check_conformable(rx, point.rx);
    const Eigen::Index m = tx.atoms();
    const Eigen::Index n = rx.atoms();
    const Eigen::Index nt = tx.antennas();
    const Eigen::Index nr = rx.antennas();

    Evaluation ev;
    // P = Phi^L W^L ... Phi^1 W^1, keeping the factor entering each phase layer.
    ev.tx_before.reserve(tx.layer_count());
    ev.tx_before.push_back(tx.boundary);
    CMatrix acc = point.tx.layers[0].asDiagonal() * tx.boundary;
    count(counter, m * nt);
    for (int l = 2; l <= tx.layer_count(); ++l) {
        ev.tx_before.push_back(tx.layer(l) * acc);
        count_product(counter, m, m, nt);
        acc = point.tx.layers[l - 1].asDiagonal() * ev.tx_before.back();
        count(counter, m * nt);
    }
    ev.P = std::move(acc);

    // Z = U^1 Psi^1 ... U^K Psi^K, keeping the factor left of each phase layer.
    ev.rx_before.reserve(rx.layer_count());
    ev.rx_before.push_back(rx.boundary);
    acc = rx.boundary * point.rx.layers[0].asDiagonal();
    count(counter, nr * n);
    for (int k = 2; k <= rx.layer_count(); ++k) {
        ev.rx_before.push_back(acc * rx.layer(k));
        count_product(counter, nr, n, n);
        acc = ev.rx_before.back() * point.rx.layers[k - 1].asDiagonal();
        count(counter, nr * n);
    }
    ev.Z = std::move(acc);

    const CMatrix zg = ev.Z * problem.G;
    count_product(counter, nr, n, m);
    ev.H_bar = (zg * ev.P) / std::sqrt(problem.noise_power);
    count_product(counter, nr, m, nt);
    count(counter, nr * nt);

    ev.f = log_det_rate(ev.H_bar, point.Q, counter);
    return ev;
}

double rate_nats(const RateProblem& problem, const OptimPoint& point) {
    return evaluate(problem, point).f;
}

RateGradient gradient(const RateProblem& problem, const OptimPoint& point, const Evaluation& at,
                      OpCounter* counter) {
    const auto& tx = problem.tx_chain;
    const auto& rx = problem.rx_chain;
    const Eigen::Index m = tx.atoms();
    const Eigen::Index n = rx.atoms();
    const Eigen::Index nt = tx.antennas();
    const Eigen::Index nr = rx.antennas();
    const int L = tx.layer_count();
    const int K = rx.layer_count();
    const double inv_sqrt_n0 = 1.0 / std::sqrt(problem.noise_power);

    RateGradient g;
    const CMatrix k = k_matrix(point.Q, at.H_bar, counter);
    const CMatrix kh = k * at.H_bar;  // N_r x N_t
    count_product(counter, nr, nr, nt);
    g.grad_Q = hermitian_part(at.H_bar.adjoint() * kh);
    count_product(counter, nt, nr, nt);

    // Q H_bar^H K, shared by both phase gradients.
    const CMatrix qhk = point.Q * kh.adjoint();  // N_t x N_r
    count_product(counter, nt, nt, nr);

    // Transmit: grad_phi_l = conj(diag(B_l X S_l)), X = Q H^H K Z G_bar,
    // S_l = Phi^L W^L ... Phi^{l+1} W^{l+1}.
    CMatrix x = (qhk * at.Z) * problem.G;
    count_product(counter, nt, nr, n);
    count_product(counter, nt, n, m);
    x *= inv_sqrt_n0;
    count(counter, nt * m);

    g.grad_phi.resize(L);
    CMatrix suffix;  // S_l, empty means identity
    for (int l = L; l >= 1; --l) {
        const CMatrix bx = at.tx_before[l - 1] * x;  // M x M
        count_product(counter, m, nt, m);
        CVector diag(m);
        if (suffix.size() == 0) {
            diag = bx.diagonal();
        } else {
            for (Eigen::Index i = 0; i < m; ++i) diag(i) = bx.row(i).transpose().cwiseProduct(suffix.col(i)).sum();
            count(counter, m * m);
        }
        g.grad_phi[l - 1] = diag.conjugate();
        if (l > 1) {
            // S_{l-1} = S_l Phi^l W^l
            const CMatrix step = point.tx.layers[l - 1].asDiagonal() * tx.layer(l);
            count(counter, m * m);
            if (suffix.size() == 0) {
                suffix = step;
            } else {
                suffix = suffix * step;
                count_product(counter, m, m, m);
            }
        }
    }

    // Receive: grad_psi_k = conj(diag(E_k V F_k)), V = G_bar P Q H^H K,
    // E_k = U^{k+1} Psi^{k+1} ... U^K Psi^K, F_k the prefix before Psi^k.
    CMatrix v = problem.G * (at.P * qhk);
    count_product(counter, m, nt, nr);
    count_product(counter, n, m, nr);
    v *= inv_sqrt_n0;
    count(counter, n * nr);

    g.grad_psi.resize(K);
    suffix.resize(0, 0);
    for (int kk = K; kk >= 1; --kk) {
        const CMatrix vf = v * at.rx_before[kk - 1];  // N x N
        count_product(counter, n, nr, n);
        CVector diag(n);
        if (suffix.size() == 0) {
            diag = vf.diagonal();
        } else {
            for (Eigen::Index i = 0; i < n; ++i) diag(i) = suffix.row(i).transpose().cwiseProduct(vf.col(i)).sum();
            count(counter, n * n);
        }
        g.grad_psi[kk - 1] = diag.conjugate();
        if (kk > 1) {
            // E_{k-1} = U^k Psi^k E_k
            const CMatrix step = rx.layer(kk) * point.rx.layers[kk - 1].asDiagonal();
            count(counter, n * n);
            if (suffix.size() == 0) {
                suffix = step;
            } else {
                suffix = step * suffix;
                count_product(counter, n, n, n);
            }
        }
    }
    return g;
}

RateGradient gradient(const RateProblem& problem, const OptimPoint& point) {
    return gradient(problem, point, evaluate(problem, point));
}

double point_distance_sq(const OptimPoint& a, const OptimPoint& b) {
    double sum = (a.Q - b.Q).squaredNorm();
    for (std::size_t l = 0; l < a.tx.layers.size(); ++l)
        sum += (a.tx.layers[l] - b.tx.layers[l]).squaredNorm();
    for (std::size_t k = 0; k < a.rx.layers.size(); ++k)
        sum += (a.rx.layers[k] - b.rx.layers[k]).squaredNorm();
    return sum;
}

double gradient_distance_sq(const RateGradient& a, const RateGradient& b) {
    double sum = (a.grad_Q - b.grad_Q).squaredNorm();
    for (std::size_t l = 0; l < a.grad_phi.size(); ++l)
        sum += (a.grad_phi[l] - b.grad_phi[l]).squaredNorm();
    for (std::size_t k = 0; k < a.grad_psi.size(); ++k)
        sum += (a.grad_psi[k] - b.grad_psi[k]).squaredNorm();
    return sum;
}

LipschitzBound lipschitz_constant(const RateProblem& problem) {
    LipschitzBound lb;
    lb.a = 1.0;
    for (int l = 1; l <= problem.tx_chain.layer_count(); ++l)
        lb.a *= spectral_norm(problem.tx_chain.layer(l));
    lb.b_k = 1.0;
    for (int k = 1; k <= problem.rx_chain.layer_count(); ++k)
        lb.b_k *= spectral_norm(problem.rx_chain.layer(k));
    lb.b = spectral_norm(problem.G);
    lb.f = lb.a;
    lb.d_over_c = lb.b_k;
    lb.c = lb.d_over_c * lb.b * lb.f / std::sqrt(problem.noise_power);

    const double power = problem.power_budget;
    const double n0 = problem.noise_power;
    const double b = lb.b;
    const double c = lb.c;
    const double f = lb.f;
    const double dc = lb.d_over_c;  // d / c
    // Written with d/c factored out so that G = 0 gives 0 rather than 0/0.
    const double shared = (lb.a + lb.b_k) * power * b * b * dc * dc / n0;
    lb.lambda_Q = lb.a * b * c + lb.b_k * b * dc;
    lb.lambda_phi = 2.0 * b * b * f * dc * dc + shared;
    lb.lambda_psi = 2.0 * b * b * f * f * dc + shared;
    lb.lambda = std::sqrt(std::max({lb.lambda_Q * lb.lambda_Q, lb.lambda_phi * lb.lambda_phi,
                                    lb.lambda_psi * lb.lambda_psi}));
    return lb;
}

}  // namespace simhmimo
