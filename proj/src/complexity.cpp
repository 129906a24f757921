// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace simhmimo {

void Dims::validate() const {
    if (nt < 1 || nr < 1 || m < 1 || n < 1 || l < 1 || k < 1)
        throw std::invalid_argument("complexity: all dimensions must be >= 1");
}

double OpBudget::ratio() const {
    return formula_multiplications > 0
               ? static_cast<double>(counted_multiplications) / static_cast<double>(formula_multiplications)
               : 0.0;
}

std::int64_t large_sim_approximation(const Dims& d) {
    d.validate();
    const std::int64_t m = d.m, n = d.n;
    const std::int64_t l2 = std::max(d.l - 2, 0), k2 = std::max(d.k - 2, 0);
    return (m * n + 3) * (m + n) + l2 * m * m * m + k2 * n * n * n;
}

std::int64_t low_order_terms(const Dims& d) {
    d.validate();
    const std::int64_t nt = d.nt, nr = d.nr, m = d.m, n = d.n;
    return nt * nt * nt + 2 * nt * nt + (nt * nt + nt) * nt / 2  // K, gradient in Q, projection
           + n * nr * nr + nt * nr * nr                        // Z-side products with K
           + m * m * nt + m * nt * nt                          // P and P Q
           + 2 * nt * nt * nr + nt * nt * m                    // H_bar^H K H_bar and X
           + nr * nr * n                                       // K Z
           + m * n * (nt + nr);                                // G products
}

std::int64_t formula_cost_per_iteration(const Dims& d) {
    return large_sim_approximation(d) + low_order_terms(d);
}

OpBudget instrumented_iteration_cost(const Dims& d, std::uint64_t seed) {
    d.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto random_matrix = [&](int rows, int cols) {
        CMatrix a(rows, cols);
        const double scale = 1.0 / std::sqrt(2.0 * cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                a(i, j) = cplx(re, im) * scale;
            }
        return a;
    };

    RateProblem problem;
    problem.tx_chain.side = Side::Transmit;
    problem.tx_chain.boundary = random_matrix(d.m, d.nt);
    for (int l = 2; l <= d.l; ++l) problem.tx_chain.inner.push_back(random_matrix(d.m, d.m));
    problem.rx_chain.side = Side::Receive;
    problem.rx_chain.boundary = random_matrix(d.nr, d.n);
    for (int k = 2; k <= d.k; ++k) problem.rx_chain.inner.push_back(random_matrix(d.n, d.n));
    problem.G = random_matrix(d.n, d.m);
    problem.noise_power = 1.0;
    problem.power_budget = 1.0;

    std::mt19937_64 phase_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    OptimPoint point;
    point.Q = CMatrix::Identity(d.nt, d.nt) * cplx(1.0 / d.nt, 0.0);
    point.tx = PhaseStack::random(Side::Transmit, d.l, d.m, phase_rng);
    point.rx = PhaseStack::random(Side::Receive, d.k, d.n, phase_rng);

    const Evaluation at = evaluate(problem, point);
    OpCounter counter;
    const RateGradient grad = gradient(problem, point, at, &counter);
    const OptimPoint next = pga_step(problem, point, grad, {1e-2, 1e-2, 1e-2}, &counter);
    evaluate(problem, next, &counter);

    OpBudget out;
    out.counted_multiplications = counter.mults;
    out.formula_multiplications = formula_cost_per_iteration(d);
    out.dims = d;
    return out;
}

std::optional<std::int64_t> cost_to_threshold(const RunTrace& trace, double fraction) {
    const double final_f = trace.records.empty() ? trace.initial_f : trace.records.back().f_nats;
    const double target = fraction * final_f;
    if (trace.initial_f >= target) return 0;
    for (const IterationRecord& rec : trace.records)
        if (rec.f_nats >= target) return rec.cumulative_mults;
    return std::nullopt;
}

std::optional<int> iterations_to_threshold(const RunTrace& trace, double fraction) {
    const double final_f = trace.records.empty() ? trace.initial_f : trace.records.back().f_nats;
    const double target = fraction * final_f;
    if (trace.initial_f >= target) return 0;
    for (const IterationRecord& rec : trace.records)
        if (rec.f_nats >= target) return rec.iteration;
    return std::nullopt;
}

const std::vector<TableRow>& published_table() {
    static const std::vector<TableRow> rows{{5, 11357}, {25, 20114}, {60, 32646}, {100, 51476}};
    return rows;
}

TableInference infer_table_dims() {
    const auto& rows = published_table();
    TableInference out;
    out.total_abs_error = std::numeric_limits<std::int64_t>::max();
    out.exact_matches.assign(rows.size(), 0);
    for (int nt = 1; nt <= 16; ++nt)
        for (int nr = 1; nr <= 16; ++nr)
            for (int n = 1; n <= 200; ++n)
                for (int l = 1; l <= 3; ++l)
                    for (int k = 1; k <= 3; ++k) {
                        std::int64_t err = 0;
                        for (std::size_t r = 0; r < rows.size(); ++r) {
                            const std::int64_t v = formula_cost_per_iteration({nt, nr, rows[r].m, n, l, k});
                            if (v == rows[r].published) ++out.exact_matches[r];
                            err += std::llabs(v - rows[r].published);
                        }
                        if (err < out.total_abs_error) {
                            out.total_abs_error = err;
                            out.best = {nt, nr, 0, n, l, k};
                        }
                    }
    for (const TableRow& row : rows) {
        Dims d = out.best;
        d.m = row.m;
        out.best_values.push_back(formula_cost_per_iteration(d));
    }
    return out;
}

std::string describe(const TableInference& inf) {
    std::ostringstream os;
    os << "best shared dims: N_t=" << inf.best.nt << " N_r=" << inf.best.nr << " N=" << inf.best.n
       << " L=" << inf.best.l << " K=" << inf.best.k << " (total |error| " << inf.total_abs_error << ")\n";
    const auto& rows = published_table();
    for (std::size_t r = 0; r < rows.size(); ++r)
        os << "  M=" << rows[r].m << " published=" << rows[r].published << " formula=" << inf.best_values[r]
           << " exact tuples=" << inf.exact_matches[r] << '\n';
    return os.str();
}

}  // namespace simhmimo
