// SPDX-License-Identifier: Apache-2.0
//
// Euclidean projections onto the feasible sets of the rate problem, and the
// capacity water-filling used by the baselines.

#pragma once

#include "simhmimo/linalg.hpp"
#include "simhmimo/op_counter.hpp"

namespace simhmimo {

struct WaterFillingResult {
    RVector eigenvalues_in;
    RVector allocations;  // d_i = (sigma_i - gamma)_+
    double water_level = 0.0;
};

/// Nearest point of {d >= 0, sum d <= budget} to sigma. The water level is
/// found by bisection on [0, max sigma] and then snapped to the exact value
/// for the resulting active set.
WaterFillingResult water_fill_projection(const RVector& sigma, double budget);

/// Element-wise u / |u|; zero entries map to 1.
CVector project_unit_modulus(const CVector& v, OpCounter* counter = nullptr);

/// Nearest Q to Y with Q >= 0 and tr(Q) <= budget. Y must be Hermitian to
/// 1e-10 relative (its Hermitian part is used); otherwise
/// std::invalid_argument.
CMatrix project_covariance(const CMatrix& Y, double budget, OpCounter* counter = nullptr);

/// Same, also returning the water-filling record.
CMatrix project_covariance(const CMatrix& Y, double budget, WaterFillingResult& record,
                           OpCounter* counter = nullptr);

struct CapacityAllocation {
    RVector powers;
    double water_level = 0.0;  // mu in p_i = (mu - 1/g_i)_+
    double rate_nats = 0.0;
};

/// Maximizes sum ln(1 + g_i p_i) subject to sum p_i <= budget, p >= 0.
CapacityAllocation water_fill_capacity(const RVector& gains, double budget);

/// Capacity-achieving covariance for a fixed (noise-normalized) channel.
CMatrix capacity_covariance(const CMatrix& H_bar, double budget, OpCounter* counter = nullptr);

}  // namespace simhmimo
