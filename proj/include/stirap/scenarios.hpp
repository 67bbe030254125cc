#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stirap/propagate.hpp"

namespace stirap {

using Json = nlohmann::ordered_json;

struct RunOptions {
    std::string out_dir;          // empty: $CAVITY_STIRAP_OUT or "."
    double tolerance = 0.0;       // 0: preset default
    int samples = 0;              // 0: preset default
    int workers = 0;              // 0: library default
    std::optional<unsigned long long> seed; // enables branch sampling
    bool write_files = true;
};

struct BranchRow {
    std::string outcome;
    double probability = 0.0;
    std::optional<double> fidelity; // vs the branch's analytic target
};

struct ScenarioResult {
    std::string name;
    std::optional<double> fidelity; // amplitude convention; squared in summary
    std::map<std::string, double> final_populations;
    std::map<std::string, double> max_populations;
    std::vector<BranchRow> branches;
    Json summary;
    std::vector<std::string> files;
};

struct SweepPoint {
    double value = 0.0;
    double fidelity = 0.0;
};

struct SweepResult {
    std::string name;
    std::string axis;
    std::vector<SweepPoint> points;
    Json summary;
    std::vector<std::string> files;
};

struct PresetInfo {
    std::string name;
    std::string description;
    Json parameters;
};

/// Frozen scenario library; every entry runs with no further inputs.
std::vector<PresetInfo> preset_catalog();

/// Config: {"preset": "...", "overrides": {...}, "window": {...}} or a fully
/// custom {"name", "system", "initial", "target", "watch", "window"}.
ScenarioResult run_scenario(const Json& config, const RunOptions& opts = {});
ScenarioResult run_preset(const std::string& preset, const RunOptions& opts = {});

/// Config additionally carries {"sweep": {"path": ..., "values": [...]}} or
/// {"path", "start", "stop", "steps"}. One numeric axis.
SweepResult run_sweep(const Json& config, const RunOptions& opts = {});

/// Resolve the output directory (options, then CAVITY_STIRAP_OUT, then ".").
std::string resolve_out_dir(const RunOptions& opts);

} // namespace stirap
