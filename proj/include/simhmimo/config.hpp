// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration: defaults, JSON parsing with unit strings, and
// validation. Internal values are SI (watts, meters, hertz); the shadowing
// deviation stays in dB.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "simhmimo/baselines.hpp"
#include "simhmimo/channel.hpp"
#include "simhmimo/geometry.hpp"
#include "simhmimo/optimizer.hpp"

namespace simhmimo {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class Scenario {
    Convergence,
    InitSensitivity,
    LayerSweep,
    AtomSweep,
    AntennaSweep,
    PhaseBaselines,
    ComplexityTable,
};

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

/// Layout of one SIM without the wavelength, which is shared by the link.
struct StackLayout {
    int side_count = 4;
    int layer_count = 2;
    double element_spacing = 0.0;  // 0 means half a wavelength
    double thickness = 0.04;
    int antenna_count = 4;

    SimGeometry geometry(double wavelength) const;
};

struct ScenarioConfig {
    StackLayout tx;
    StackLayout rx;
    LinkParams link;
    double frequency = 6e9;
    OptimizerConfig optimizer;
    AoConfig ao;

    Scenario scenario = Scenario::Convergence;
    int realizations = 5;
    std::uint64_t seed_base = 1;
    std::string output_path = "results/out.csv";
    int threads = 0;  // 0: hardware concurrency
    int init_starts = 50;
    bool include_ao = true;
    std::vector<int> layer_values{1, 2, 3, 4, 5, 6, 7};
    std::vector<int> atom_sides{3, 4, 5, 6};
    std::vector<int> antenna_values{1, 2, 4, 8};

    /// Desk-scale defaults: 16 atoms per layer, two layers, four antennas.
    static ScenarioConfig desk();
    /// Full-size preset: 100 atoms per layer, seven layers, ten antennas. Slow.
    static ScenarioConfig paper_scale();

    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParseOptions {
    bool strict = true;          // unknown keys are errors, else warnings
    bool allow_empty = false;    // an empty file yields the defaults
};

struct ParseResult {
    ScenarioConfig config;
    std::vector<std::string> warnings;
};

/// JSON text, nested objects or dotted keys ("link.distance").
ParseResult parse_config_text(const std::string& text, const ParseOptions& options = {});
ParseResult parse_config(const std::filesystem::path& path, const ParseOptions& options = {});

/// Plain numbers are taken as SI. Strings carry a unit: "20 dBm", "0.1 W",
/// "100 mW", "6 GHz", "50 mm", "9 dB".
enum class Quantity { Power, Frequency, Length, Decibel, Plain };
double parse_quantity(const std::string& text, Quantity kind);

/// Round-trips every field as a nested JSON document.
std::string config_to_json(const ScenarioConfig& config, int indent = 2);

}  // namespace simhmimo
