// SPDX-License-Identifier: Apache-2.0
//
// Complex-multiplication tally, counted at the matrix-product level.

#pragma once

#include <cstdint>

namespace simhmimo {

/// Per-run counter. Functions that accept an `OpCounter*` add the number of
/// complex multiplications they perform; a null pointer disables counting.
///
/// Conventions: (a x b)(b x c) costs a*b*c; scaling an a x b matrix by a
/// diagonal or a scalar costs a*b; an n x n Cholesky costs n^3/6; a triangular
/// solve with r right-hand sides costs n^2 r; a Hermitian eigendecomposition
/// costs n^3.
struct OpCounter {
    std::int64_t mults = 0;

    void add(std::int64_t n) { mults += n; }
    void product(std::int64_t rows, std::int64_t inner, std::int64_t cols) {
        mults += rows * inner * cols;
    }
};

inline void count(OpCounter* counter, std::int64_t n) {
    if (counter) counter->add(n);
}

inline void count_product(OpCounter* counter, std::int64_t rows, std::int64_t inner,
                          std::int64_t cols) {
    if (counter) counter->product(rows, inner, cols);
}

}  // namespace simhmimo
