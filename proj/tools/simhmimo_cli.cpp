// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the scenario runner.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "simhmimo/complexity.hpp"
#include "simhmimo/experiments.hpp"

using namespace simhmimo;

int main(int argc, char** argv) {
    CLI::App app{"SIM-assisted HMIMO rate simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::optional<int> realizations;
    std::optional<int> threads;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    std::string config_path;
    bool paper_scale = false;
    bool allow_unknown = false;
    bool allow_empty = false;

    app.add_option("--seed", seed, "Base seed; realization r uses seed + r");
    app.add_option("--realizations", realizations, "Channel realizations per parameter point")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out, "CSV output path; the JSON summary goes next to it");
    app.add_option("--mode", mode, "Step rule")->check(CLI::IsMember({"fixed", "armijo"}));
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--paper-scale", paper_scale, "Start from the full-size preset (slow)");
    app.add_flag("--allow-unknown", allow_unknown, "Warn instead of failing on unknown config keys");
    app.add_flag("--allow-empty", allow_empty, "Accept an empty config file as the defaults");

    auto* run_cmd = app.add_subcommand("run", "Run the scenario described by a JSON config");
    run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

    struct Shortcut {
        const char* name;
        const char* help;
        Scenario scenario;
    };
    const Shortcut shortcuts[] = {
        {"convergence", "Rate versus iteration for PGA and AO", Scenario::Convergence},
        {"init-sensitivity", "Best of many random starts versus the default start", Scenario::InitSensitivity},
        {"sweep-layers", "Mean rate versus transmit layer count", Scenario::LayerSweep},
        {"sweep-atoms", "Mean rate versus atoms per layer", Scenario::AtomSweep},
        {"sweep-antennas", "Mean rate versus antenna count", Scenario::AntennaSweep},
        {"baselines", "Optimized, random, equal phases and digital precoding", Scenario::PhaseBaselines},
        {"complexity", "Cost to 95% of the final rate, PGA versus AO", Scenario::ComplexityTable},
    };
    std::optional<Scenario> chosen;
    for (const Shortcut& s : shortcuts) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "Optional base config")->check(CLI::ExistingFile);
        const Scenario scenario = s.scenario;
        sub->callback([&chosen, scenario] { chosen = scenario; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioConfig config = paper_scale ? ScenarioConfig::paper_scale() : ScenarioConfig::desk();
        if (!config_path.empty()) {
            ParseOptions options;
            options.strict = !allow_unknown;
            options.allow_empty = allow_empty;
            ParseResult parsed = parse_config(config_path, options);
            for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
            config = parsed.config;
        }
        if (chosen) config.scenario = *chosen;
        if (seed) config.seed_base = *seed;
        if (realizations) config.realizations = *realizations;
        if (threads) config.threads = *threads;
        if (out) config.output_path = *out;
        if (mode) config.optimizer.mode = *mode == "fixed" ? StepMode::FixedStep : StepMode::Backtracking;
        config.validate();

        const ScenarioReport report = run_scenario(config);
        const auto summary = nlohmann::json::parse(report.summary_json);
        std::cout << "scenario: " << to_string(config.scenario) << '\n'
                  << "csv: " << config.output_path << '\n'
                  << "summary: " << summary_path_for(config.output_path).string() << '\n'
                  << "aggregates: " << summary["aggregates"].dump(2) << '\n';
        if (config.scenario == Scenario::ComplexityTable) std::cout << describe(infer_table_dims());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
