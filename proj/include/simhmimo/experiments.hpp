// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo scenario runner. Every scenario produces one CSV body and one
// JSON summary. CSV bodies are a pure function of the configuration; only the
// summary carries a timestamp.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simhmimo/config.hpp"
#include "simhmimo/objective.hpp"

namespace simhmimo {

/// Fixed geometry and link; hands out one rate problem per channel seed.
class InstanceFactory {
public:
    InstanceFactory(const SimGeometry& tx, const SimGeometry& rx, const LinkParams& link);
    InstanceFactory(const ScenarioConfig& config, const StackLayout& tx, const StackLayout& rx);

    RateProblem problem(std::uint64_t seed) const;
    const LinkParams& link() const { return link_; }

private:
    LinkParams link_;
    TransferChain tx_;
    TransferChain rx_;
    ChannelSampler sampler_;
};

struct ScenarioReport {
    std::string csv;
    std::string summary_json;
    std::vector<std::uint64_t> seeds;
};

/// Runs the configured scenario without touching the file system.
ScenarioReport compute_scenario(const ScenarioConfig& config);

/// The summary sits next to the CSV with a .json extension.
std::filesystem::path summary_path_for(const std::filesystem::path& csv_path);

/// Creates missing parent directories and opens the file for writing.
/// Throws std::runtime_error when that fails.
void ensure_writable(const std::filesystem::path& path);

/// Checks both output paths, computes, then writes CSV and summary.
ScenarioReport run_scenario(const ScenarioConfig& config);

/// "simhmimo <version> (<git describe>)".
std::string provenance();

/// Frozen CSV headers, one per scenario.
std::string csv_header(Scenario scenario);

}  // namespace simhmimo
