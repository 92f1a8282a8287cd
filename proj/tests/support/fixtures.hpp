#pragma once

// Fixed instances from the worked examples.

#include <fstream>
#include <string>

#include "dtmon/automaton.hpp"
#include "dtmon/monitor.hpp"
#include "dtmon/simulator.hpp"

namespace dtmon::testing {

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

/// Three components a, b, c; the location records the last action seen.
inline TimedAutomaton last_action_automaton() {
  return load_automaton(read_json(DTMON_DATA_DIR "/properties/last_action.json"));
}

inline Scenario skewed_scenario(const Alphabet& alphabet) {
  return load_scenario(read_json(DTMON_DATA_DIR "/scenarios/three_monitors.json"), alphabet);
}

/// Collected trace of M1 at local time 10, as timed words in ticks.
inline TimedWord m1_collected(const Alphabet& al) {
  return {{{al.at("a"), 1000},
           {al.at("c"), 2000},
           {al.at("b"), 3000},
           {al.at("b"), 5000},
           {al.at("c"), 5500},
           {al.at("a"), 7000},
           {al.at("a"), 10000}}};
}

inline ApproxTimedWord atw_of(const TimedWord& w, std::size_t from, std::size_t to, Ticks skew) {
  TimedWord part;
  part.events.assign(w.events.begin() + static_cast<std::ptrdiff_t>(from), w.events.begin() + static_cast<std::ptrdiff_t>(to));
  return approximate(part, skew);
}

}  // namespace dtmon::testing
