// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simhmimo/projection.hpp"

namespace simhmimo {

void OptimizerConfig::validate() const {
    if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("optimizer: shrink must be in (0, 1)");
    for (double v : step_base)
        if (!(v > 0.0)) throw std::invalid_argument("optimizer: step_base must be > 0");
    for (double v : sufficient_increase)
        if (!(v > 0.0)) throw std::invalid_argument("optimizer: sufficient_increase must be > 0");
    if (!(min_step > 0.0)) throw std::invalid_argument("optimizer: min_step must be > 0");
    if (max_iters < 0) throw std::invalid_argument("optimizer: max_iters must be >= 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("optimizer: rel_tol must be > 0");
    if (tol_window < 1) throw std::invalid_argument("optimizer: tol_window must be >= 1");
    if (!(fixed_step_scale > 0.0)) throw std::invalid_argument("optimizer: fixed_step_scale must be > 0");
}

OptimPoint pga_step(const RateProblem& problem, const OptimPoint& point, const RateGradient& grad,
                    const StepTriple& steps, OpCounter* counter) {
    OptimPoint next;
    const Eigen::Index nt = point.Q.rows();
    next.Q = project_covariance(point.Q + steps[0] * grad.grad_Q, problem.power_budget, counter);
    count(counter, nt * nt);

    next.tx.side = point.tx.side;
    next.tx.layers.reserve(point.tx.layers.size());
    for (std::size_t l = 0; l < point.tx.layers.size(); ++l) {
        next.tx.layers.push_back(project_unit_modulus(point.tx.layers[l] + steps[1] * grad.grad_phi[l], counter));
        count(counter, point.tx.layers[l].size());
    }
    next.rx.side = point.rx.side;
    next.rx.layers.reserve(point.rx.layers.size());
    for (std::size_t k = 0; k < point.rx.layers.size(); ++k) {
        next.rx.layers.push_back(project_unit_modulus(point.rx.layers[k] + steps[2] * grad.grad_psi[k], counter));
        count(counter, point.rx.layers[k].size());
    }
    return next;
}

StepTriple step_lengths_sq(const OptimPoint& a, const OptimPoint& b) {
    StepTriple out{(a.Q - b.Q).squaredNorm(), 0.0, 0.0};
    for (std::size_t l = 0; l < a.tx.layers.size(); ++l) out[1] += (a.tx.layers[l] - b.tx.layers[l]).squaredNorm();
    for (std::size_t k = 0; k < a.rx.layers.size(); ++k) out[2] += (a.rx.layers[k] - b.rx.layers[k]).squaredNorm();
    return out;
}

int max_backtrack_exponent(double step_base, double shrink, double min_step) {
    int kappa = 0;
    double mu = step_base;
    while (mu >= min_step) {
        mu *= shrink;
        ++kappa;
    }
    return kappa;
}

namespace {

bool sufficient(double f_new, double f_old, const StepTriple& delta, const StepTriple& moved) {
    return f_new >= f_old + delta[0] * moved[0] + delta[1] * moved[1] + delta[2] * moved[2];
}

StepTriple steps_for(const OptimizerConfig& cfg, const ExponentTriple& kappa) {
    StepTriple mu{};
    for (int q = 0; q < 3; ++q) mu[q] = cfg.step_base[q] * std::pow(cfg.shrink, kappa[q]);
    return mu;
}

ArmijoOutcome shared_search(const RateProblem& problem, const OptimPoint& point, const Evaluation& at,
                            const RateGradient& grad, const OptimizerConfig& cfg, OpCounter* counter) {
    int kappa_max = 0;
    for (int q = 0; q < 3; ++q)
        kappa_max = std::max(kappa_max, max_backtrack_exponent(cfg.step_base[q], cfg.shrink, cfg.min_step));

    ArmijoOutcome out;
    for (int kappa = 0; kappa <= kappa_max; ++kappa) {
        const ExponentTriple ks{kappa, kappa, kappa};
        const StepTriple mu = steps_for(cfg, ks);
        OptimPoint trial = pga_step(problem, point, grad, mu, counter);
        Evaluation ev = evaluate(problem, trial, counter);
        if (sufficient(ev.f, at.f, cfg.sufficient_increase, step_lengths_sq(trial, point))) {
            out.point = std::move(trial);
            out.evaluation = std::move(ev);
            out.steps = mu;
            out.exponents = ks;
            return out;
        }
    }
    out.point = point;
    out.evaluation = at;
    out.exponents = {kappa_max, kappa_max, kappa_max};
    out.steps = steps_for(cfg, out.exponents);
    out.stalled = true;
    return out;
}

// Per-family exponents: each family first backtracks on its own (others held
// at the current point), then all exponents grow together until the joint
// condition holds.
ArmijoOutcome per_variable_search(const RateProblem& problem, const OptimPoint& point,
                                  const Evaluation& at, const RateGradient& grad,
                                  const OptimizerConfig& cfg, OpCounter* counter) {
    ExponentTriple kmax{};
    for (int q = 0; q < 3; ++q) kmax[q] = max_backtrack_exponent(cfg.step_base[q], cfg.shrink, cfg.min_step);

    ExponentTriple kappa{0, 0, 0};
    for (int q = 0; q < 3; ++q) {
        for (; kappa[q] < kmax[q]; ++kappa[q]) {
            StepTriple mu{0.0, 0.0, 0.0};
            mu[q] = cfg.step_base[q] * std::pow(cfg.shrink, kappa[q]);
            const OptimPoint trial = pga_step(problem, point, grad, mu, counter);
            const Evaluation ev = evaluate(problem, trial, counter);
            if (sufficient(ev.f, at.f, cfg.sufficient_increase, step_lengths_sq(trial, point))) break;
        }
    }

    ArmijoOutcome out;
    while (true) {
        const StepTriple mu = steps_for(cfg, kappa);
        OptimPoint trial = pga_step(problem, point, grad, mu, counter);
        Evaluation ev = evaluate(problem, trial, counter);
        if (sufficient(ev.f, at.f, cfg.sufficient_increase, step_lengths_sq(trial, point))) {
            out.point = std::move(trial);
            out.evaluation = std::move(ev);
            out.steps = mu;
            out.exponents = kappa;
            return out;
        }
        bool advanced = false;
        for (int q = 0; q < 3; ++q)
            if (kappa[q] < kmax[q]) {
                ++kappa[q];
                advanced = true;
            }
        if (!advanced) break;
    }
    out.point = point;
    out.evaluation = at;
    out.exponents = kappa;
    out.steps = steps_for(cfg, kappa);
    out.stalled = true;
    return out;
}

}  // namespace

ArmijoOutcome armijo_search(const RateProblem& problem, const OptimPoint& point, const Evaluation& at,
                            const RateGradient& grad, const OptimizerConfig& config, OpCounter* counter) {
    return config.per_variable_search ? per_variable_search(problem, point, at, grad, config, counter)
                                      : shared_search(problem, point, at, grad, config, counter);
}

RunResult run(const RateProblem& problem, const OptimPoint& initial, const OptimizerConfig& config) {
    config.validate();
    problem.check_feasible(initial);

    RunResult result;
    result.point = initial;
    OpCounter counter;
    Evaluation current = evaluate(problem, result.point, &counter);
    result.trace.initial_f = current.f;

    StepTriple fixed{0.0, 0.0, 0.0};
    if (config.mode == StepMode::FixedStep) {
        const double lambda = lipschitz_constant(problem).lambda;
        result.trace.lipschitz = lambda;
        const double mu = lambda > 0.0 ? config.fixed_step_scale / lambda : config.step_base[0];
        fixed = {mu, mu, mu};
    }

    StepTriple last_steps = config.mode == StepMode::FixedStep ? fixed : config.step_base;
    int quiet = 0;
    double previous_f = current.f;
    for (int n = 1; n <= config.max_iters; ++n) {
        const RateGradient grad = gradient(problem, result.point, current, &counter);

        IterationRecord rec;
        rec.iteration = n;
        if (config.mode == StepMode::FixedStep) {
            OptimPoint next = pga_step(problem, result.point, grad, fixed, &counter);
            current = evaluate(problem, next, &counter);
            result.point = std::move(next);
            rec.steps = fixed;
        } else {
            ArmijoOutcome step = armijo_search(problem, result.point, current, grad, config, &counter);
            if (step.stalled) {
                result.trace.status = RunStatus::Stalled;
                break;
            }
            result.point = std::move(step.point);
            current = std::move(step.evaluation);
            rec.steps = step.steps;
            rec.backtracks = step.exponents;
        }
        last_steps = rec.steps;
        rec.f_nats = current.f;
        rec.rate_bits = nats_to_bits(current.f);
        rec.cumulative_mults = counter.mults;
        result.trace.records.push_back(rec);

        const double change = std::abs(current.f - previous_f) / std::max(std::abs(previous_f), 1e-300);
        quiet = change < config.rel_tol ? quiet + 1 : 0;
        previous_f = current.f;
        if (quiet >= config.tol_window) {
            result.trace.status = RunStatus::Converged;
            break;
        }
    }

    if (config.max_iters > 0) {
        const RateGradient grad = gradient(problem, result.point, current);
        const OptimPoint probe = pga_step(problem, result.point, grad, last_steps);
        result.trace.critical_residual = std::sqrt(point_distance_sq(probe, result.point));
    }
    return result;
}

}  // namespace simhmimo
