// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "simhmimo/experiments.hpp"

using namespace simhmimo;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny(Scenario s) {
    ScenarioConfig c = ScenarioConfig::desk();
    c.tx.side_count = c.rx.side_count = 2;
    c.tx.layer_count = c.rx.layer_count = 1;
    c.tx.antenna_count = c.rx.antenna_count = 2;
    c.optimizer.max_iters = 6;
    c.ao.max_outer_iters = 1;
    c.ao.phase_grid_points = 8;
    c.realizations = 2;
    c.seed_base = 40;
    c.init_starts = 3;
    c.layer_values = {1, 2};
    c.atom_sides = {2, 3};
    c.antenna_values = {1, 2};
    c.scenario = s;
    return c;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

const Scenario kAll[] = {Scenario::Convergence,   Scenario::InitSensitivity, Scenario::LayerSweep,
                         Scenario::AtomSweep,     Scenario::AntennaSweep,    Scenario::PhaseBaselines,
                         Scenario::ComplexityTable};

}  // namespace

TEST_CASE("every scenario writes its header and tags rows with seeds") {
    for (Scenario s : kAll) {
        CAPTURE(to_string(s));
        const ScenarioReport r = compute_scenario(tiny(s));
        const std::vector<std::string> rows = lines(r.csv);
        REQUIRE(rows.size() > 1);
        CHECK(rows[0] == csv_header(s));
        const auto columns = std::count(rows[0].begin(), rows[0].end(), ',');
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::count(rows[i].begin(), rows[i].end(), ',') == columns);
            const bool sweep = rows[0].rfind("parameter,", 0) == 0;
            // the seed (or first seed) is column 0 for per-seed rows
            const std::string head = rows[i].substr(0, rows[i].find(','));
            if (!sweep) CHECK((head == "40" || head == "41"));
        }
        CHECK(r.seeds == std::vector<std::uint64_t>{40, 41});

        const auto summary = nlohmann::json::parse(r.summary_json);
        CHECK(summary["schema_version"] == 1);
        CHECK(summary.contains("provenance"));
        CHECK(summary.contains("timestamp"));
        CHECK(summary.contains("config"));
        CHECK(summary["seeds"].size() == 2);
        CHECK(summary.contains("aggregates"));
    }
}

TEST_CASE("output is reproducible and independent of the thread count") {
    for (Scenario s : {Scenario::Convergence, Scenario::LayerSweep, Scenario::InitSensitivity}) {
        ScenarioConfig a = tiny(s);
        a.threads = 1;
        ScenarioConfig b = a;
        b.threads = 4;
        const std::string first = compute_scenario(a).csv;
        CHECK(compute_scenario(a).csv == first);
        CHECK(compute_scenario(b).csv == first);
    }
}

TEST_CASE("files on disk") {
    const fs::path dir = fs::temp_directory_path() / "simhmimo_test_experiments";
    fs::remove_all(dir);
    ScenarioConfig c = tiny(Scenario::PhaseBaselines);
    c.output_path = (dir / "nested" / "base.csv").string();
    const ScenarioReport r = run_scenario(c);
    std::ifstream csv(c.output_path);
    std::stringstream body;
    body << csv.rdbuf();
    CHECK(body.str() == r.csv);
    CHECK(fs::exists(summary_path_for(c.output_path)));
    CHECK(summary_path_for("a/b.csv") == fs::path("a/b.json"));
    fs::remove_all(dir);
}

TEST_CASE("unwritable output fails before any work") {
    const fs::path dir = fs::temp_directory_path() / "simhmimo_test_blocker";
    fs::remove_all(dir);
    { std::ofstream(dir.string()) << "x"; }  // a file where a directory is needed
    ScenarioConfig c = tiny(Scenario::Convergence);
    c.realizations = 1000;  // would take minutes if it were computed first
    c.output_path = (dir / "out.csv").string();
    CHECK_THROWS_AS(run_scenario(c), std::runtime_error);
    fs::remove(dir);
}
