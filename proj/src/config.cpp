// SPDX-License-Identifier: Apache-2.0

#include "simhmimo/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace simhmimo {

using nlohmann::json;

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::Convergence: return "convergence";
        case Scenario::InitSensitivity: return "init_sensitivity";
        case Scenario::LayerSweep: return "layer_sweep";
        case Scenario::AtomSweep: return "atom_sweep";
        case Scenario::AntennaSweep: return "antenna_sweep";
        case Scenario::PhaseBaselines: return "phase_baselines";
        case Scenario::ComplexityTable: return "complexity_table";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
    for (Scenario s : {Scenario::Convergence, Scenario::InitSensitivity, Scenario::LayerSweep,
                       Scenario::AtomSweep, Scenario::AntennaSweep, Scenario::PhaseBaselines,
                       Scenario::ComplexityTable})
        if (to_string(s) == name) return s;
    throw ConfigError("unknown scenario '" + name +
                      "' (expected convergence, init_sensitivity, layer_sweep, atom_sweep, "
                      "antenna_sweep, phase_baselines or complexity_table)");
}

SimGeometry StackLayout::geometry(double wavelength) const {
    const double spacing = element_spacing > 0.0 ? element_spacing : wavelength / 2.0;
    return SimGeometry::square(side_count, layer_count, spacing, thickness, antenna_count, wavelength);
}

ScenarioConfig ScenarioConfig::desk() {
    ScenarioConfig c;
    c.link.wavelength = kSpeedOfLight / c.frequency;
    return c;
}

ScenarioConfig ScenarioConfig::paper_scale() {
    ScenarioConfig c = desk();
    for (StackLayout* s : {&c.tx, &c.rx}) {
        s->side_count = 10;
        s->layer_count = 7;
        s->antenna_count = 10;
    }
    c.atom_sides = {5, 7, 10};
    c.antenna_values = {2, 4, 6, 8, 10};
    return c;
}

namespace {

void check_layout(const StackLayout& s, const std::string& prefix) {
    if (s.side_count < 1) throw ConfigError(prefix + ".side_count must be >= 1");
    if (s.layer_count < 1) throw ConfigError(prefix + ".layer_count must be >= 1");
    if (s.element_spacing < 0.0) throw ConfigError(prefix + ".element_spacing must be >= 0 (0 = half wavelength)");
    if (!(s.thickness > 0.0)) throw ConfigError(prefix + ".thickness must be > 0");
    if (s.antenna_count < 1) throw ConfigError(prefix + ".antenna_count must be >= 1");
}

void check_list(const std::vector<int>& v, const std::string& key) {
    if (v.empty()) throw ConfigError(key + " must not be empty");
    for (int x : v)
        if (x < 1) throw ConfigError(key + " entries must be >= 1");
}

}  // namespace

void ScenarioConfig::validate() const {
    check_layout(tx, "geometry.tx");
    check_layout(rx, "geometry.rx");
    if (!(frequency > 0.0)) throw ConfigError("link.frequency must be > 0");
    if (std::abs(kSpeedOfLight / frequency - link.wavelength) > 1e-3 * link.wavelength)
        throw ConfigError("link.wavelength is inconsistent with link.frequency (c = f * lambda)");
    try {
        link.validate();
        optimizer.validate();
        ao.validate();
        tx.geometry(link.wavelength).validate();
        rx.geometry(link.wavelength).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (realizations < 1) throw ConfigError("scenario.realizations must be >= 1");
    if (threads < 0) throw ConfigError("scenario.threads must be >= 0");
    if (init_starts < 1) throw ConfigError("scenario.init_starts must be >= 1");
    if (output_path.empty()) throw ConfigError("scenario.output_path must not be empty");
    check_list(layer_values, "scenario.layer_values");
    check_list(atom_sides, "scenario.atom_sides");
    check_list(antenna_values, "scenario.antenna_values");
}

double parse_quantity(const std::string& text, Quantity kind) {
    std::istringstream is(text);
    double value = 0.0;
    if (!(is >> value)) throw ConfigError("cannot read a number from '" + text + "'");
    std::string unit;
    is >> unit;
    std::string rest;
    if (is >> rest) throw ConfigError("trailing text in '" + text + "'");

    auto bad_unit = [&](const char* expected) {
        return ConfigError("unit '" + unit + "' in '" + text + "' (expected " + expected + ")");
    };
    switch (kind) {
        case Quantity::Power:
            if (unit.empty() || unit == "W") return value;
            if (unit == "mW") return value * 1e-3;
            if (unit == "dBm") return std::pow(10.0, value / 10.0) * 1e-3;
            if (unit == "dBW") return std::pow(10.0, value / 10.0);
            throw bad_unit("W, mW, dBm or dBW");
        case Quantity::Frequency:
            if (unit.empty() || unit == "Hz") return value;
            if (unit == "kHz") return value * 1e3;
            if (unit == "MHz") return value * 1e6;
            if (unit == "GHz") return value * 1e9;
            throw bad_unit("Hz, kHz, MHz or GHz");
        case Quantity::Length:
            if (unit.empty() || unit == "m") return value;
            if (unit == "cm") return value * 1e-2;
            if (unit == "mm") return value * 1e-3;
            if (unit == "km") return value * 1e3;
            throw bad_unit("m, cm, mm or km");
        case Quantity::Decibel:
            if (unit.empty() || unit == "dB") return value;
            throw bad_unit("dB");
        case Quantity::Plain:
            if (unit.empty()) return value;
            throw bad_unit("no unit");
    }
    return value;
}

namespace {

void flatten(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        return;
    }
    if (out.count(prefix)) throw ConfigError("key '" + prefix + "' given more than once");
    out[prefix] = node;
}

double number(const std::string& key, const json& v, Quantity kind) {
    try {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return parse_quantity(v.get<std::string>(), kind);
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
    throw ConfigError(key + ": expected a number or a quantity string");
}

double positive(const std::string& key, const json& v, Quantity kind) {
    const double x = number(key, v, kind);
    if (!(x > 0.0)) throw ConfigError(key + ": must be > 0");
    return x;
}

long long integer(const std::string& key, const json& v, long long lo) {
    if (!v.is_number_integer())
        throw ConfigError(key + ": expected an integer >= " + std::to_string(lo));
    const long long x = v.get<long long>();
    if (x < lo) throw ConfigError(key + ": must be >= " + std::to_string(lo));
    return x;
}

bool boolean(const std::string& key, const json& v) {
    if (!v.is_boolean()) throw ConfigError(key + ": expected true or false");
    return v.get<bool>();
}

std::vector<int> int_list(const std::string& key, const json& v) {
    if (!v.is_array()) throw ConfigError(key + ": expected an array of integers >= 1");
    std::vector<int> out;
    for (const json& e : v) out.push_back(static_cast<int>(integer(key, e, 1)));
    return out;
}

StepTriple triple(const std::string& key, const json& v) {
    if (v.is_array()) {
        if (v.size() != 3) throw ConfigError(key + ": expected 3 values (Q, transmit, receive)");
        return {positive(key, v[0], Quantity::Plain), positive(key, v[1], Quantity::Plain),
                positive(key, v[2], Quantity::Plain)};
    }
    const double x = positive(key, v, Quantity::Plain);
    return {x, x, x};
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const json&)>;

void add_layout_keys(std::map<std::string, Setter>& table, const std::string& prefix,
                     StackLayout ScenarioConfig::*member) {
    table[prefix + ".side_count"] = [member](ScenarioConfig& c, const std::string& k, const json& v) {
        (c.*member).side_count = static_cast<int>(integer(k, v, 1));
    };
    table[prefix + ".layer_count"] = [member](ScenarioConfig& c, const std::string& k, const json& v) {
        (c.*member).layer_count = static_cast<int>(integer(k, v, 1));
    };
    table[prefix + ".element_spacing"] = [member](ScenarioConfig& c, const std::string& k, const json& v) {
        const double x = number(k, v, Quantity::Length);
        if (x < 0.0) throw ConfigError(k + ": must be >= 0 (0 = half wavelength)");
        (c.*member).element_spacing = x;
    };
    table[prefix + ".thickness"] = [member](ScenarioConfig& c, const std::string& k, const json& v) {
        (c.*member).thickness = positive(k, v, Quantity::Length);
    };
    table[prefix + ".antenna_count"] = [member](ScenarioConfig& c, const std::string& k, const json& v) {
        (c.*member).antenna_count = static_cast<int>(integer(k, v, 1));
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        add_layout_keys(t, "geometry.tx", &ScenarioConfig::tx);
        add_layout_keys(t, "geometry.rx", &ScenarioConfig::rx);

        t["link.distance"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.link.distance = positive(k, v, Quantity::Length);
        };
        t["link.ref_distance"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.link.ref_distance = positive(k, v, Quantity::Length);
        };
        t["link.exponent"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.link.exponent = positive(k, v, Quantity::Plain);
        };
        t["link.shadow_sigma"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            const double x = number(k, v, Quantity::Decibel);
            if (x < 0.0) throw ConfigError(k + ": must be >= 0 dB");
            c.link.shadow_sigma_db = x;
        };
        t["link.noise_power"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.link.noise_power = positive(k, v, Quantity::Power);
        };
        t["link.power"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.link.power_budget = positive(k, v, Quantity::Power);
        };
        // frequency and wavelength are reconciled after all keys are read
        t["link.frequency"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.frequency = positive(k, v, Quantity::Frequency);
        };
        t["link.wavelength"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.link.wavelength = positive(k, v, Quantity::Length);
        };

        t["optimizer.mode"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            const std::string s = v.is_string() ? v.get<std::string>() : "";
            if (s == "fixed") c.optimizer.mode = StepMode::FixedStep;
            else if (s == "armijo") c.optimizer.mode = StepMode::Backtracking;
            else throw ConfigError(k + ": expected \"fixed\" or \"armijo\"");
        };
        t["optimizer.step_base"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.step_base = triple(k, v);
        };
        t["optimizer.sufficient_increase"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.sufficient_increase = triple(k, v);
        };
        t["optimizer.shrink"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            const double x = number(k, v, Quantity::Plain);
            if (!(x > 0.0 && x < 1.0)) throw ConfigError(k + ": must be in (0, 1)");
            c.optimizer.shrink = x;
        };
        t["optimizer.min_step"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.min_step = positive(k, v, Quantity::Plain);
        };
        t["optimizer.max_iters"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.max_iters = static_cast<int>(integer(k, v, 1));
        };
        t["optimizer.rel_tol"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.rel_tol = positive(k, v, Quantity::Plain);
        };
        t["optimizer.tol_window"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.tol_window = static_cast<int>(integer(k, v, 1));
        };
        t["optimizer.per_variable_search"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.per_variable_search = boolean(k, v);
        };
        t["optimizer.fixed_step_scale"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.fixed_step_scale = positive(k, v, Quantity::Plain);
        };
        t["optimizer.seed"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.optimizer.seed = static_cast<std::uint64_t>(integer(k, v, 0));
        };

        t["ao.phase_grid_points"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.ao.phase_grid_points = static_cast<int>(integer(k, v, 4));
        };
        t["ao.max_outer_iters"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.ao.max_outer_iters = static_cast<int>(integer(k, v, 1));
        };
        t["ao.rel_tol"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.ao.rel_tol = positive(k, v, Quantity::Plain);
        };

        t["scenario.type"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            if (!v.is_string()) throw ConfigError(k + ": expected a scenario name");
            try {
                c.scenario = scenario_from_string(v.get<std::string>());
            } catch (const ConfigError& e) {
                throw ConfigError(k + ": " + e.what());
            }
        };
        t["scenario.preset"] = [](ScenarioConfig&, const std::string&, const json&) {};  // applied first
        t["scenario.realizations"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.realizations = static_cast<int>(integer(k, v, 1));
        };
        t["scenario.seed_base"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.seed_base = static_cast<std::uint64_t>(integer(k, v, 0));
        };
        t["scenario.output_path"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError(k + ": expected a path");
            c.output_path = v.get<std::string>();
        };
        t["scenario.threads"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.threads = static_cast<int>(integer(k, v, 0));
        };
        t["scenario.init_starts"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.init_starts = static_cast<int>(integer(k, v, 1));
        };
        t["scenario.include_ao"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.include_ao = boolean(k, v);
        };
        t["scenario.layer_values"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.layer_values = int_list(k, v);
        };
        t["scenario.atom_sides"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.atom_sides = int_list(k, v);
        };
        t["scenario.antenna_values"] = [](ScenarioConfig& c, const std::string& k, const json& v) {
            c.antenna_values = int_list(k, v);
        };
        return t;
    }();
    return table;
}

}  // namespace

ParseResult parse_config_text(const std::string& text, const ParseOptions& options) {
    json doc;
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) {
        if (!options.allow_empty) throw ConfigError("config is empty (enable defaults to accept this)");
        doc = json::object();
    } else {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    std::map<std::string, json> flat;
    flatten(doc, "", flat);

    ParseResult result;
    result.config = ScenarioConfig::desk();
    if (auto it = flat.find("scenario.preset"); it != flat.end()) {
        const std::string preset = it->second.is_string() ? it->second.get<std::string>() : "";
        if (preset == "paper") result.config = ScenarioConfig::paper_scale();
        else if (preset != "desk") throw ConfigError("scenario.preset: expected \"desk\" or \"paper\"");
    }

    const auto& table = setters();
    for (const auto& [key, value] : flat) {
        auto it = table.find(key);
        if (it == table.end()) {
            const std::string msg = "unknown key '" + key + "'";
            if (options.strict) throw ConfigError(msg);
            result.warnings.push_back(msg);
            continue;
        }
        it->second(result.config, key, value);
    }

    const bool has_f = flat.count("link.frequency") > 0;
    const bool has_lambda = flat.count("link.wavelength") > 0;
    if (has_f && !has_lambda) result.config.link.wavelength = kSpeedOfLight / result.config.frequency;
    if (has_lambda && !has_f) result.config.frequency = kSpeedOfLight / result.config.link.wavelength;

    result.config.validate();
    return result;
}

ParseResult parse_config(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), options);
}

std::string config_to_json(const ScenarioConfig& c, int indent) {
    auto layout = [](const StackLayout& s) {
        return json{{"side_count", s.side_count},
                    {"layer_count", s.layer_count},
                    {"element_spacing", s.element_spacing},
                    {"thickness", s.thickness},
                    {"antenna_count", s.antenna_count}};
    };
    auto arr = [](const StepTriple& t) { return json::array({t[0], t[1], t[2]}); };
    json doc;
    doc["geometry"] = {{"tx", layout(c.tx)}, {"rx", layout(c.rx)}};
    doc["link"] = {{"frequency", c.frequency},
                   {"wavelength", c.link.wavelength},
                   {"distance", c.link.distance},
                   {"ref_distance", c.link.ref_distance},
                   {"exponent", c.link.exponent},
                   {"shadow_sigma", c.link.shadow_sigma_db},
                   {"noise_power", c.link.noise_power},
                   {"power", c.link.power_budget}};
    doc["optimizer"] = {{"mode", c.optimizer.mode == StepMode::FixedStep ? "fixed" : "armijo"},
                        {"step_base", arr(c.optimizer.step_base)},
                        {"shrink", c.optimizer.shrink},
                        {"sufficient_increase", arr(c.optimizer.sufficient_increase)},
                        {"min_step", c.optimizer.min_step},
                        {"max_iters", c.optimizer.max_iters},
                        {"rel_tol", c.optimizer.rel_tol},
                        {"tol_window", c.optimizer.tol_window},
                        {"per_variable_search", c.optimizer.per_variable_search},
                        {"fixed_step_scale", c.optimizer.fixed_step_scale},
                        {"seed", c.optimizer.seed}};
    doc["ao"] = {{"phase_grid_points", c.ao.phase_grid_points},
                 {"max_outer_iters", c.ao.max_outer_iters},
                 {"rel_tol", c.ao.rel_tol}};
    doc["scenario"] = {{"type", to_string(c.scenario)},
                       {"realizations", c.realizations},
                       {"seed_base", c.seed_base},
                       {"output_path", c.output_path},
                       {"threads", c.threads},
                       {"init_starts", c.init_starts},
                       {"include_ao", c.include_ao},
                       {"layer_values", c.layer_values},
                       {"atom_sides", c.atom_sides},
                       {"antenna_values", c.antenna_values}};
    return doc.dump(indent);
}

}  // namespace simhmimo
