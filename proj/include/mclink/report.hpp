#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mclink/config.hpp"
#include "mclink/sim_engine.hpp"

namespace mclink {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Bound report for a configuration. Includes the raw-link bounds and the
/// bounds with the ffs setup/hold window folded into tau_s.
KeyValues solve_report(const SimConfig& cfg);
void write_key_values(const KeyValues& kv, std::ostream& out);

/// seed, params, stats, violations.
nlohmann::json run_result_json(const RunResult& r, const LoadedConfig& cfg);

}  // namespace mclink
