#pragma once

// Hashing and JSON-lines serialisation of simulation traces.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dtmon/simulator.hpp"

namespace dtmon {

std::string sha256_hex(const std::string& data);

nlohmann::json to_json(const TimelineRecord& r);
nlohmann::json to_json(const Delivery& d, const SentMessage& m);

/// Writes global_trace.jsonl, deliveries.jsonl and verdicts.jsonl; each file
/// starts with `header`.
void write_trace(const std::filesystem::path& dir, const SimTrace& trace, const nlohmann::json& header);

/// Rebuilds a scenario from a trace directory: true events from
/// global_trace.jsonl and delivery dates from deliveries.jsonl. Clock
/// profiles and the skew come from `base`.
Scenario scenario_from_trace(const std::filesystem::path& dir, const Scenario& base, const Alphabet& alphabet);

}  // namespace dtmon
