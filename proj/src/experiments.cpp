// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "simhmimo/baselines.hpp"
#include "simhmimo/complexity.hpp"

#ifndef SIMHMIMO_GIT_DESCRIBE
#define SIMHMIMO_GIT_DESCRIBE "unknown"
#endif

namespace simhmimo {

using nlohmann::json;

InstanceFactory::InstanceFactory(const SimGeometry& tx, const SimGeometry& rx, const LinkParams& link)
    : link_(link),
      tx_(build_transfer_chain(tx, Side::Transmit)),
      rx_(build_transfer_chain(rx, Side::Receive)),
      sampler_(tx, rx, link) {}

InstanceFactory::InstanceFactory(const ScenarioConfig& config, const StackLayout& tx, const StackLayout& rx)
    : InstanceFactory(tx.geometry(config.link.wavelength), rx.geometry(config.link.wavelength), config.link) {}

RateProblem InstanceFactory::problem(std::uint64_t seed) const {
    return RateProblem::from(tx_, rx_, sampler_.draw(seed), link_.power_budget);
}

std::string provenance() { return std::string("simhmimo 0.1.0 (") + SIMHMIMO_GIT_DESCRIBE + ")"; }

std::filesystem::path summary_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    return p.replace_extension(".json");
}

void ensure_writable(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw std::runtime_error("output path is not writable: " + path.string());
}

std::string csv_header(Scenario scenario) {
    switch (scenario) {
        case Scenario::Convergence:
            return "seed,realization,method,iteration,f_nats,R_bits,step,cum_mults";
        case Scenario::InitSensitivity:
            return "seed,realization,default_R_bits,best_R_bits,best_start,mean_R_bits,worst_R_bits";
        case Scenario::LayerSweep:
        case Scenario::AtomSweep:
        case Scenario::AntennaSweep:
            return "parameter,value,seed_first,seed_last,realizations,mean_R_bits,std_R_bits,"
                   "mean_initial_R_bits,mean_digital_R_bits";
        case Scenario::PhaseBaselines:
            return "seed,realization,optimized_R_bits,random_R_bits,equal_R_bits,digital_R_bits";
        case Scenario::ComplexityTable:
            return "seed,realization,pga_R_bits,ao_R_bits,pga_iters_to_95,pga_cost_to_95,"
                   "ao_outer_iters_to_95,ao_inner_iters_to_95,ao_cost_to_95,formula_per_iter,"
                   "counted_per_iter";
    }
    return "";
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
    return v ? std::to_string(*v) : std::string("unreachable");
}

/// Runs body(i) for i in [0, n) on a pool; the first exception is rethrown.
template <class F>
void parallel_for(int n, int threads, F body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(n, 1));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double final_bits(const RunTrace& t) {
    return nats_to_bits(t.records.empty() ? t.initial_f : t.records.back().f_nats);
}

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

Aggregate aggregate(const std::vector<double>& v) {
    Aggregate a;
    for (double x : v) a.mean += x;
    a.mean /= static_cast<double>(v.size());
    for (double x : v) a.stddev += (x - a.mean) * (x - a.mean);
    a.stddev = v.size() > 1 ? std::sqrt(a.stddev / static_cast<double>(v.size() - 1)) : 0.0;
    return a;
}

void append_trace(std::ostringstream& os, std::uint64_t seed, int r, const char* method, const RunTrace& t,
                  bool with_steps) {
    os << seed << ',' << r << ',' << method << ",0," << num(t.initial_f) << ',' << num(nats_to_bits(t.initial_f))
       << ",0,0\n";
    for (const IterationRecord& rec : t.records)
        os << seed << ',' << r << ',' << method << ',' << rec.iteration << ',' << num(rec.f_nats) << ','
           << num(rec.rate_bits) << ',' << num(with_steps ? rec.steps[0] : 0.0) << ','
           << rec.cumulative_mults << '\n';
}

struct Context {
    const ScenarioConfig& config;
    std::ostringstream csv;
    json aggregates = json::object();
    std::vector<std::uint64_t> seeds;
};

void run_convergence(Context& ctx) {
    const ScenarioConfig& c = ctx.config;
    const InstanceFactory factory(c, c.tx, c.rx);
    std::vector<std::string> blocks(static_cast<std::size_t>(c.realizations));
    std::vector<double> armijo(blocks.size()), fixed(blocks.size()), ao(blocks.size(), 0.0);
    parallel_for(c.realizations, c.threads, [&](int r) {
        const std::uint64_t seed = c.seed_base + static_cast<std::uint64_t>(r);
        const RateProblem problem = factory.problem(seed);
        std::ostringstream os;
        // Both step rules are traced; the configured one feeds the headline mean.
        OptimizerConfig rule = c.optimizer;
        rule.mode = StepMode::Backtracking;
        const RunResult backtracking = run(problem, problem.default_start(), rule);
        append_trace(os, seed, r, "pga_armijo", backtracking.trace, true);
        armijo[r] = final_bits(backtracking.trace);
        rule.mode = StepMode::FixedStep;
        const RunResult fixed_step = run(problem, problem.default_start(), rule);
        append_trace(os, seed, r, "pga_fixed", fixed_step.trace, true);
        fixed[r] = final_bits(fixed_step.trace);
        if (c.include_ao) {
            const AoResult a = ao_run(problem, problem.default_start(), c.ao);
            append_trace(os, seed, r, "ao_outer", a.outer, false);
            append_trace(os, seed, r, "ao_inner", a.inner, false);
            ao[r] = final_bits(a.outer);
        }
        blocks[r] = os.str();
    });
    for (int r = 0; r < c.realizations; ++r) {
        ctx.seeds.push_back(c.seed_base + static_cast<std::uint64_t>(r));
        ctx.csv << blocks[r];
    }
    ctx.aggregates["mean_pga_R_bits"] =
        aggregate(c.optimizer.mode == StepMode::FixedStep ? fixed : armijo).mean;
    ctx.aggregates["mean_pga_armijo_R_bits"] = aggregate(armijo).mean;
    ctx.aggregates["mean_pga_fixed_R_bits"] = aggregate(fixed).mean;
    if (c.include_ao) ctx.aggregates["mean_ao_R_bits"] = aggregate(ao).mean;
}

void run_init_sensitivity(Context& ctx) {
    const ScenarioConfig& c = ctx.config;
    const InstanceFactory factory(c, c.tx, c.rx);
    std::vector<std::string> rows(static_cast<std::size_t>(c.realizations));
    parallel_for(c.realizations, c.threads, [&](int r) {
        const std::uint64_t seed = c.seed_base + static_cast<std::uint64_t>(r);
        const RateProblem problem = factory.problem(seed);
        const double base = final_bits(run(problem, problem.default_start(), c.optimizer).trace);
        std::seed_seq seq{seed, std::uint64_t{0x5157}};
        std::mt19937_64 rng(seq);
        // Start 0 is the default initialization, so the best start can never
        // fall below it.
        double best = base, worst = base, sum = base;
        int best_index = 0;
        for (int s = 1; s < c.init_starts; ++s) {
            OptimPoint start = problem.default_start();
            start.tx = PhaseStack::random(Side::Transmit, start.tx.layer_count(),
                                          problem.tx_chain.atoms(), rng);
            start.rx = PhaseStack::random(Side::Receive, start.rx.layer_count(),
                                          problem.rx_chain.atoms(), rng);
            const double v = final_bits(run(problem, start, c.optimizer).trace);
            sum += v;
            if (v > best) {
                best = v;
                best_index = s;
            }
            worst = std::min(worst, v);
        }
        std::ostringstream os;
        os << seed << ',' << r << ',' << num(base) << ',' << num(best) << ',' << best_index << ','
           << num(sum / c.init_starts) << ',' << num(worst) << '\n';
        rows[r] = os.str();
    });
    for (int r = 0; r < c.realizations; ++r) {
        ctx.seeds.push_back(c.seed_base + static_cast<std::uint64_t>(r));
        ctx.csv << rows[r];
    }
}

// Sweeps reuse the channel seed of realization r at every parameter point,
// so points differ only in the swept parameter.
void run_sweep(Context& ctx) {
    const ScenarioConfig& c = ctx.config;
    const std::vector<int>& values = c.scenario == Scenario::LayerSweep  ? c.layer_values
                                     : c.scenario == Scenario::AtomSweep ? c.atom_sides
                                                                         : c.antenna_values;
    const char* parameter = c.scenario == Scenario::LayerSweep  ? "L"
                            : c.scenario == Scenario::AtomSweep ? "M"
                                                                : "N_t";
    const int points = static_cast<int>(values.size());
    const int tasks = points * c.realizations;

    std::vector<std::unique_ptr<InstanceFactory>> factories;
    for (int v : values) {
        StackLayout tx = c.tx, rx = c.rx;
        if (c.scenario == Scenario::LayerSweep) tx.layer_count = v;
        if (c.scenario == Scenario::AtomSweep) tx.side_count = rx.side_count = v;
        if (c.scenario == Scenario::AntennaSweep) tx.antenna_count = rx.antenna_count = v;
        factories.push_back(std::make_unique<InstanceFactory>(c, tx, rx));
    }

    std::vector<double> rate(tasks), initial(tasks), digital(tasks);
    parallel_for(tasks, c.threads, [&](int task) {
        const int p = task / c.realizations;
        const int r = task % c.realizations;
        const std::uint64_t seed = c.seed_base + static_cast<std::uint64_t>(r);
        const RateProblem problem = factories[p]->problem(seed);
        const RunResult res = run(problem, problem.default_start(), c.optimizer);
        rate[task] = final_bits(res.trace);
        initial[task] = nats_to_bits(res.trace.initial_f);
        const CMatrix h = draw_direct_channel(problem.tx_antennas(), problem.rx_antennas(), c.link, seed);
        digital[task] = digital_precoding_rate(h, c.link.noise_power, c.link.power_budget);
    });

    json means = json::array();
    for (int p = 0; p < points; ++p) {
        auto slice = [&](const std::vector<double>& v) {
            return std::vector<double>(v.begin() + p * c.realizations, v.begin() + (p + 1) * c.realizations);
        };
        const Aggregate a = aggregate(slice(rate));
        const int shown = c.scenario == Scenario::AtomSweep ? values[p] * values[p] : values[p];
        ctx.csv << parameter << ',' << shown << ',' << c.seed_base << ','
                << c.seed_base + static_cast<std::uint64_t>(c.realizations - 1) << ',' << c.realizations << ','
                << num(a.mean) << ',' << num(a.stddev) << ',' << num(aggregate(slice(initial)).mean) << ','
                << num(aggregate(slice(digital)).mean) << '\n';
        means.push_back({{"value", shown}, {"mean_R_bits", a.mean}});
    }
    for (int r = 0; r < c.realizations; ++r) ctx.seeds.push_back(c.seed_base + static_cast<std::uint64_t>(r));
    ctx.aggregates["points"] = means;
}

void run_phase_baselines(Context& ctx) {
    const ScenarioConfig& c = ctx.config;
    const InstanceFactory factory(c, c.tx, c.rx);
    const std::size_t n = static_cast<std::size_t>(c.realizations);
    std::vector<double> opt(n), rnd(n), eq(n), dig(n);
    parallel_for(c.realizations, c.threads, [&](int r) {
        const std::uint64_t seed = c.seed_base + static_cast<std::uint64_t>(r);
        const RateProblem problem = factory.problem(seed);
        opt[r] = final_bits(run(problem, problem.default_start(), c.optimizer).trace);
        rnd[r] = fixed_phase_rate(PhaseMode::Random, problem, seed);
        eq[r] = fixed_phase_rate(PhaseMode::Equal, problem);
        const CMatrix h = draw_direct_channel(problem.tx_antennas(), problem.rx_antennas(), c.link, seed);
        dig[r] = digital_precoding_rate(h, c.link.noise_power, c.link.power_budget);
    });
    for (int r = 0; r < c.realizations; ++r) {
        const std::uint64_t seed = c.seed_base + static_cast<std::uint64_t>(r);
        ctx.seeds.push_back(seed);
        ctx.csv << seed << ',' << r << ',' << num(opt[r]) << ',' << num(rnd[r]) << ',' << num(eq[r]) << ','
                << num(dig[r]) << '\n';
    }
    ctx.aggregates["mean_optimized_R_bits"] = aggregate(opt).mean;
    ctx.aggregates["mean_random_R_bits"] = aggregate(rnd).mean;
    ctx.aggregates["mean_equal_R_bits"] = aggregate(eq).mean;
    ctx.aggregates["mean_digital_R_bits"] = aggregate(dig).mean;
}

void run_complexity_table(Context& ctx) {
    const ScenarioConfig& c = ctx.config;
    const InstanceFactory factory(c, c.tx, c.rx);
    const Dims dims{c.tx.antenna_count, c.rx.antenna_count, c.tx.side_count * c.tx.side_count,
                    c.rx.side_count * c.rx.side_count, c.tx.layer_count, c.rx.layer_count};
    const std::int64_t formula = formula_cost_per_iteration(dims);
    const std::int64_t counted = instrumented_iteration_cost(dims, c.seed_base).counted_multiplications;

    std::vector<std::string> rows(static_cast<std::size_t>(c.realizations));
    parallel_for(c.realizations, c.threads, [&](int r) {
        const std::uint64_t seed = c.seed_base + static_cast<std::uint64_t>(r);
        const RateProblem problem = factory.problem(seed);
        const RunResult p = run(problem, problem.default_start(), c.optimizer);
        const AoResult a = ao_run(problem, problem.default_start(), c.ao);
        std::ostringstream os;
        os << seed << ',' << r << ',' << num(final_bits(p.trace)) << ',' << num(final_bits(a.outer)) << ','
           << opt(iterations_to_threshold(p.trace, 0.95)) << ',' << opt(cost_to_threshold(p.trace, 0.95)) << ','
           << opt(iterations_to_threshold(a.outer, 0.95)) << ',' << opt(iterations_to_threshold(a.inner, 0.95))
           << ',' << opt(cost_to_threshold(a.outer, 0.95)) << ',' << formula << ',' << counted << '\n';
        rows[r] = os.str();
    });
    for (int r = 0; r < c.realizations; ++r) {
        ctx.seeds.push_back(c.seed_base + static_cast<std::uint64_t>(r));
        ctx.csv << rows[r];
    }

    const TableInference inf = infer_table_dims();
    json table = json::array();
    for (std::size_t i = 0; i < published_table().size(); ++i)
        table.push_back({{"M", published_table()[i].m},
                         {"published", published_table()[i].published},
                         {"formula_at_best_dims", inf.best_values[i]},
                         {"exact_tuples", inf.exact_matches[i]}});
    ctx.aggregates["table_inference"] = {{"best_dims",
                                          {{"N_t", inf.best.nt},
                                           {"N_r", inf.best.nr},
                                           {"N", inf.best.n},
                                           {"L", inf.best.l},
                                           {"K", inf.best.k}}},
                                         {"total_abs_error", inf.total_abs_error},
                                         {"rows", table}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

ScenarioReport compute_scenario(const ScenarioConfig& config) {
    config.validate();
    Context ctx{config, {}, json::object(), {}};
    ctx.csv << csv_header(config.scenario) << '\n';
    switch (config.scenario) {
        case Scenario::Convergence: run_convergence(ctx); break;
        case Scenario::InitSensitivity: run_init_sensitivity(ctx); break;
        case Scenario::LayerSweep:
        case Scenario::AtomSweep:
        case Scenario::AntennaSweep: run_sweep(ctx); break;
        case Scenario::PhaseBaselines: run_phase_baselines(ctx); break;
        case Scenario::ComplexityTable: run_complexity_table(ctx); break;
    }

    json summary;
    summary["schema_version"] = 1;
    summary["scenario"] = to_string(config.scenario);
    summary["provenance"] = provenance();
    summary["timestamp"] = utc_timestamp();
    summary["config"] = json::parse(config_to_json(config));
    summary["seeds"] = ctx.seeds;
    summary["csv_header"] = csv_header(config.scenario);
    summary["aggregates"] = ctx.aggregates;

    ScenarioReport report;
    report.csv = ctx.csv.str();
    report.summary_json = summary.dump(2);
    report.seeds = std::move(ctx.seeds);
    return report;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    const std::filesystem::path csv_path(config.output_path);
    const std::filesystem::path json_path = summary_path_for(csv_path);
    ensure_writable(csv_path);
    ensure_writable(json_path);

    ScenarioReport report = compute_scenario(config);
    std::ofstream(csv_path, std::ios::trunc) << report.csv;
    std::ofstream(json_path, std::ios::trunc) << report.summary_json << '\n';
    return report;
}

}  // namespace simhmimo
