#pragma once

#include "pathwise/exposure.hpp"
#include "pathwise/process.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pathwise::cli {

// Fully-resolved run configuration. Parse-then-validate: nothing is computed
// until the whole config is accepted. The canonical JSON echo contains every
// result-defining field; execution hints (workers, output paths) are excluded
// so that outputs are byte-identical across worker counts.
struct RunConfig {
    std::string command;
    std::string process = "gaussian:mu=0,sigma=1";
    std::string schedule;                // "lump:6", "dca:6", "custom:0.5,0.5"
    std::vector<std::string> schedules;  // compare: names resolved per horizon
    std::string horizon_range;           // compare: "a..b" or "a..b:step" or "t"
    std::uint64_t paths = 100000;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string output = "csv"; // csv | json
    std::string out_file;       // empty: stdout
    double z_max = 4.0;
    bool exact = false;
    bool allow_leverage = false;
    bool rational = false;
    std::string dump_paths_file;

    bool operator==(const RunConfig&) const = default;
};

ProcessSpec parse_process(const std::string& text);

// "lump:6" etc.; weights for "custom:" split on ',' or ';'. Rejects a_j > 1
// unless allow_leverage.
Schedule parse_schedule(const std::string& text, bool allow_leverage);

// Resolve a schedule *name* (compare mode) at a given horizon.
Schedule schedule_for_horizon(const std::string& name, int t, bool allow_leverage);

// "4" -> {4}; "1..50" -> 1,...,50; "10..100:10" -> 10,20,...,100.
std::vector<std::int64_t> parse_horizon_range(const std::string& text);

nlohmann::json canonical_config(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

// Flat "key = value" file mirroring flag names; '#' starts a comment.
// Applied before flag parsing so flags take precedence.
void apply_config_file(const std::string& path, RunConfig& cfg);

} // namespace pathwise::cli
