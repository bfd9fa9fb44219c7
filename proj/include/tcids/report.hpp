#pragma once

// Scenario-config and report schemas for the batch front-end. Configs are
// JSON; the report echoes the fully resolved config (defaults included and
// listed) so a run can be reproduced bit-exactly from its report alone.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcids/analysis.hpp"
#include "tcids/encoder.hpp"
#include "tcids/simulation.hpp"

namespace tcids::cli {

using nlohmann::json;

struct ScenarioConfig {
    EncoderConfig encoder;
    sim::SourceSpec source;
    sim::AttackSpec attack;
    Tick horizon = 2000;
    std::size_t trials = 1;
    std::uint64_t rng_seed = 1;
    std::string output_path;  // empty: stdout summary only
};

/// Parsed config plus the paths of every field that fell back to a
/// default (no silent defaults: the report lists them all).
struct ParsedConfig {
    ScenarioConfig config;
    std::vector<std::string> defaults_applied;
};

/// Throws std::invalid_argument with the offending field path.
ParsedConfig parse_scenario_config(const json& doc);
ParsedConfig load_scenario_config(const std::string& path);

json encoder_to_json(const EncoderConfig& cfg);
json source_to_json(const sim::SourceSpec& spec);
json attack_to_json(const sim::AttackSpec& attack);
json config_to_json(const ScenarioConfig& cfg);

json trace_to_json(const sim::Trace& trace);
json estimate_to_json(const analysis::DetectionEstimate& est);

/// Full report document: schema/tool version, resolved config echo,
/// defaults list, results, and an analytic comparison block when the
/// scenario admits one (fixed-gap tamper runs).
json build_run_report(const ParsedConfig& parsed,
                      const analysis::DetectionEstimate& estimate,
                      const sim::Trace* single_trace, double wall_time_ms);

void write_report(const json& report, const std::string& path);

}  // namespace tcids::cli
