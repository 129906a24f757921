// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace simhmimo {

namespace {

double allocated(const RVector& sigma, double gamma) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) total += std::max(sigma(i) - gamma, 0.0);
    return total;
}

}  // namespace

WaterFillingResult water_fill_projection(const RVector& sigma, double budget) {
    if (budget < 0.0) throw std::invalid_argument("water_fill_projection: negative budget");
    WaterFillingResult out;
    out.eigenvalues_in = sigma;
    out.water_level = 0.0;

    if (sigma.size() > 0 && allocated(sigma, 0.0) > budget) {
        const double tol = 1e-10 * std::max(budget, 1.0);
        double lo = 0.0;
        double hi = sigma.maxCoeff();
        double gamma = 0.5 * (lo + hi);
        for (int iter = 0; iter < 400; ++iter) {
            gamma = 0.5 * (lo + hi);
            const double excess = allocated(sigma, gamma) - budget;
            if (std::abs(excess) <= tol) break;
            (excess > 0.0 ? lo : hi) = gamma;
        }
        // Snap to the exact level of the active set found by bisection.
        double active_sum = 0.0;
        int active = 0;
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma(i) > gamma) {
                active_sum += sigma(i);
                ++active;
            }
        if (active > 0) {
            const double exact = (active_sum - budget) / active;
            bool consistent = exact >= 0.0;
            for (Eigen::Index i = 0; i < sigma.size() && consistent; ++i)
                consistent = (sigma(i) > gamma) == (sigma(i) > exact);
            if (consistent) gamma = exact;
        }
        out.water_level = gamma;
    }

    out.allocations.resize(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        out.allocations(i) = std::max(sigma(i) - out.water_level, 0.0);
    return out;
}

CVector project_unit_modulus(const CVector& v, OpCounter* counter) {
    CVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double r = std::abs(v(i));
        out(i) = r > 0.0 ? v(i) / r : cplx(1.0, 0.0);
    }
    count(counter, 2 * v.size());
    return out;
}

CMatrix project_covariance(const CMatrix& Y, double budget, WaterFillingResult& record,
                           OpCounter* counter) {
    if (Y.rows() != Y.cols()) throw std::invalid_argument("project_covariance: matrix not square");
    if (hermitian_defect(Y) > 1e-10)
        throw std::invalid_argument("project_covariance: matrix not Hermitian");
    const Eigen::Index n = Y.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(Y));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("project_covariance: eigensolver failed");
    count(counter, n * n * n);

    record = water_fill_projection(eig.eigenvalues(), budget);
    count(counter, n);
    const CMatrix& u = eig.eigenvectors();
    CMatrix q = u * record.allocations.cast<cplx>().asDiagonal() * u.adjoint();
    count(counter, n * n + (n * n + n) * n / 2);
    return hermitian_part(q);
}

CMatrix project_covariance(const CMatrix& Y, double budget, OpCounter* counter) {
    WaterFillingResult record;
    return project_covariance(Y, budget, record, counter);
}

CapacityAllocation water_fill_capacity(const RVector& gains, double budget) {
    if (budget < 0.0) throw std::invalid_argument("water_fill_capacity: negative budget");
    const Eigen::Index n = gains.size();
    CapacityAllocation out;
    out.powers = RVector::Zero(n);
    if (n == 0 || budget == 0.0) return out;

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return gains(a) > gains(b); });

    double inverse_sum = 0.0;
    double level = 0.0;
    Eigen::Index active = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double g = gains(order[k]);
        if (!(g > 0.0)) break;
        const double candidate = (budget + inverse_sum + 1.0 / g) / static_cast<double>(k + 1);
        if (candidate <= 1.0 / g) break;
        inverse_sum += 1.0 / g;
        level = candidate;
        active = k + 1;
    }
    out.water_level = level;
    for (Eigen::Index k = 0; k < active; ++k) {
        const Eigen::Index i = order[k];
        out.powers(i) = std::max(level - 1.0 / gains(i), 0.0);
        out.rate_nats += std::log1p(gains(i) * out.powers(i));
    }
    return out;
}

CMatrix capacity_covariance(const CMatrix& H_bar, double budget, OpCounter* counter) {
    const Eigen::Index nt = H_bar.cols();
    const CMatrix gram = H_bar.adjoint() * H_bar;
    count_product(counter, nt, H_bar.rows(), nt);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(gram));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("capacity_covariance: eigensolver failed");
    count(counter, nt * nt * nt);
    const RVector gains = eig.eigenvalues().cwiseMax(0.0);
    const CapacityAllocation alloc = water_fill_capacity(gains, budget);
    const CMatrix& v = eig.eigenvectors();
    count(counter, nt * nt + (nt * nt + nt) * nt / 2);
    return hermitian_part(v * alloc.powers.cast<cplx>().asDiagonal() * v.adjoint());
}

}  // namespace simhmimo
