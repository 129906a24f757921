// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "simhmimo/projection.hpp"

namespace simhmimo {

void AoConfig::validate() const {
    if (phase_grid_points < 4) throw std::invalid_argument("ao: phase_grid_points must be >= 4");
    if (max_outer_iters < 0) throw std::invalid_argument("ao: max_outer_iters must be >= 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("ao: rel_tol must be > 0");
}

namespace {

cplx& element(OptimPoint& point, Side side, int layer, int atom) {
    PhaseStack& stack = side == Side::Transmit ? point.tx : point.rx;
    return stack.layers.at(static_cast<std::size_t>(layer))(atom);
}

}  // namespace

ElementUpdate ao_element_update(const RateProblem& problem, OptimPoint& point, Side side,
                                int layer, int atom, double current_f, int grid_points,
                                OpCounter* counter) {
    cplx& slot = element(point, side, layer, atom);
    const cplx original = slot;
    const double h = 2.0 * kPi / grid_points;

    auto trial = [&](double theta) {
        slot = std::polar(1.0, theta);
        return evaluate(problem, point, counter).f;
    };

    std::vector<double> values(static_cast<std::size_t>(grid_points));
    int best = 0;
    for (int j = 0; j < grid_points; ++j) {
        values[j] = trial(j * h);
        if (values[j] > values[best]) best = j;
    }

    ElementUpdate out{original, current_f};
    if (values[best] > out.f) out = {std::polar(1.0, best * h), values[best]};

    // Vertex of the parabola through the best grid point and its neighbours.
    const double fm = values[(best + grid_points - 1) % grid_points];
    const double f0 = values[best];
    const double fp = values[(best + 1) % grid_points];
    const double curvature = fm - 2.0 * f0 + fp;
    if (curvature < 0.0) {
        const double offset = std::clamp(0.5 * h * (fm - fp) / curvature, -h, h);
        if (offset != 0.0) {
            const double theta = best * h + offset;
            const double fr = trial(theta);
            if (fr > out.f) out = {std::polar(1.0, theta), fr};
        }
    }
    slot = out.value;
    return out;
}

AoResult ao_run(const RateProblem& problem, const OptimPoint& initial, const AoConfig& config) {
    config.validate();
    problem.check_feasible(initial);

    AoResult result;
    result.point = initial;
    OpCounter counter;
    double f = evaluate(problem, result.point, &counter).f;
    result.outer.initial_f = f;
    result.inner.initial_f = f;

    const int tx_layers = problem.tx_chain.layer_count();
    const int rx_layers = problem.rx_chain.layer_count();
    const int m = problem.tx_chain.atoms();
    const int n = problem.rx_chain.atoms();
    result.updates_per_outer = tx_layers * m + rx_layers * n + 1;

    int inner_index = 0;
    auto record_inner = [&] {
        IterationRecord rec;
        rec.iteration = ++inner_index;
        rec.f_nats = f;
        rec.rate_bits = nats_to_bits(f);
        rec.cumulative_mults = counter.mults;
        result.inner.records.push_back(rec);
    };

    for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
        const double before = f;
        for (int l = 0; l < tx_layers; ++l)
            for (int a = 0; a < m; ++a) {
                f = ao_element_update(problem, result.point, Side::Transmit, l, a, f,
                                      config.phase_grid_points, &counter).f;
                record_inner();
            }
        for (int k = 0; k < rx_layers; ++k)
            for (int a = 0; a < n; ++a) {
                f = ao_element_update(problem, result.point, Side::Receive, k, a, f,
                                      config.phase_grid_points, &counter).f;
                record_inner();
            }

        const Evaluation at = evaluate(problem, result.point, &counter);
        const CMatrix q = capacity_covariance(at.H_bar, problem.power_budget, &counter);
        const double fq = log_det_rate(at.H_bar, q, &counter);
        // The water-filled covariance is optimal for this H_bar; the guard only
        // absorbs rounding so the trace stays monotone.
        if (fq >= f) {
            result.point.Q = q;
            f = fq;
        }
        record_inner();

        IterationRecord rec;
        rec.iteration = outer;
        rec.f_nats = f;
        rec.rate_bits = nats_to_bits(f);
        rec.cumulative_mults = counter.mults;
        result.outer.records.push_back(rec);

        if (std::abs(f - before) / std::max(std::abs(before), 1e-300) < config.rel_tol) {
            result.outer.status = RunStatus::Converged;
            result.inner.status = RunStatus::Converged;
            break;
        }
    }
    return result;
}

double fixed_phase_rate(PhaseMode mode, const RateProblem& problem, std::uint64_t seed) {
    OptimPoint point;
    const int tx_layers = problem.tx_chain.layer_count();
    const int rx_layers = problem.rx_chain.layer_count();
    if (mode == PhaseMode::Equal) {
        point.tx = PhaseStack::uniform(Side::Transmit, tx_layers, problem.tx_chain.atoms(), kPi / 2.0);
        point.rx = PhaseStack::uniform(Side::Receive, rx_layers, problem.rx_chain.atoms(), kPi / 2.0);
    } else {
        std::mt19937_64 rng(seed);
        point.tx = PhaseStack::random(Side::Transmit, tx_layers, problem.tx_chain.atoms(), rng);
        point.rx = PhaseStack::random(Side::Receive, rx_layers, problem.rx_chain.atoms(), rng);
    }
    const int nt = problem.tx_antennas();
    point.Q = CMatrix::Zero(nt, nt);
    const Evaluation at = evaluate(problem, point);
    return nats_to_bits(log_det_rate(at.H_bar, capacity_covariance(at.H_bar, problem.power_budget)));
}

CMatrix draw_direct_channel(int tx_antennas, int rx_antennas, const LinkParams& link,
                            std::uint64_t seed) {
    if (tx_antennas < 1 || rx_antennas < 1)
        throw std::invalid_argument("draw_direct_channel: antenna counts must be >= 1");
    link.validate();
    std::mt19937_64 rng(seed);
    const double pl_db = path_loss_db(link.distance, link.ref_distance, link.exponent,
                                      link.shadow_sigma_db, link.wavelength, rng);
    std::normal_distribution<double> normal(0.0, std::sqrt(db_to_linear(-pl_db) / 2.0));
    CMatrix h(rx_antennas, tx_antennas);
    for (int j = 0; j < tx_antennas; ++j)
        for (int i = 0; i < rx_antennas; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            h(i, j) = cplx(re, im);
        }
    return h;
}

double digital_precoding_rate(const CMatrix& H, double noise_power, double power_budget) {
    if (!(noise_power > 0.0)) throw std::invalid_argument("digital_precoding_rate: noise_power must be > 0");
    if (!(power_budget >= 0.0)) throw std::invalid_argument("digital_precoding_rate: power must be >= 0");
    Eigen::JacobiSVD<CMatrix> svd(H / std::sqrt(noise_power));
    const RVector gains = svd.singularValues().array().square().matrix();
    return nats_to_bits(water_fill_capacity(gains, power_budget).rate_nats);
}

}  // namespace simhmimo
