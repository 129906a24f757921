// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/linalg.hpp"

#include <algorithm>

namespace simhmimo {

double spectral_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

double hermitian_defect(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace simhmimo
