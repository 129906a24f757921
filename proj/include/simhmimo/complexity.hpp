// SPDX-License-Identifier: Apache-2.0
//
// Closed-form per-iteration multiplication counts for the projected gradient
// method, an instrumented tally of one real iteration, and cost-to-threshold
// accounting over run traces.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simhmimo/optimizer.hpp"

namespace simhmimo {

struct Dims {
    int nt = 4;
    int nr = 4;
    int m = 16;
    int n = 16;
    int l = 2;
    int k = 2;

    void validate() const;
};

struct OpBudget {
    std::int64_t counted_multiplications = 0;
    std::int64_t formula_multiplications = 0;
    Dims dims;

    double ratio() const;  // counted / formula
};

/// Term-by-term closed form. The cubic layer terms use max(L-2, 0) and
/// max(K-2, 0) so that single-layer stacks do not go negative.
std::int64_t formula_cost_per_iteration(const Dims& d);

/// Dominant terms (MN+3)(M+N) + (L-2)M^3 + (K-2)N^3, same clamping.
std::int64_t large_sim_approximation(const Dims& d);

/// Everything the approximation drops; full == approximation + low order.
std::int64_t low_order_terms(const Dims& d);

/// Counts one projected gradient iteration (gradient, fixed-size step with
/// both projections, evaluation of the new point) on a random instance with
/// the given dimensions.
OpBudget instrumented_iteration_cost(const Dims& d, std::uint64_t seed);

/// Cumulative multiplications at the first record whose f reaches
/// fraction * (final f); the initial point counts as cost 0. Returns nullopt
/// when no record reaches it.
std::optional<std::int64_t> cost_to_threshold(const RunTrace& trace, double fraction);

/// Same search, returning the record's iteration index (0 for the start).
std::optional<int> iterations_to_threshold(const RunTrace& trace, double fraction);

/// One row of the published per-iteration complexity table.
struct TableRow {
    int m = 0;
    std::int64_t published = 0;
};

const std::vector<TableRow>& published_table();

struct TableInference {
    Dims best;                        // shared (N, N_t, N_r, L, K), m per row
    std::int64_t total_abs_error = 0;
    std::vector<std::int64_t> best_values;
    std::vector<int> exact_matches;   // per row, tuples reproducing it exactly
};

/// Searches N_t, N_r in 1..16, N in 1..200, L, K in 1..3 for the hidden
/// dimensions behind the table. Informational only.
TableInference infer_table_dims();

std::string describe(const TableInference& inference);

}  // namespace simhmimo
