// SPDX-License-Identifier: Apache-2.0
//
// Eigen aliases and a few dense helpers shared by every module.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace simhmimo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Largest singular value.
double spectral_norm(const CMatrix& a);

/// (A + A^H) / 2.
inline CMatrix hermitian_part(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

/// Max |A - A^H| entry relative to max(1, max |A|).
double hermitian_defect(const CMatrix& a);

}  // namespace simhmimo
