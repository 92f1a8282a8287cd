#pragma once

// Seeded random instances shared by the unit tests and the acceptance suite.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dtmon/automaton.hpp"
#include "dtmon/simulator.hpp"
#include "dtmon/words.hpp"

namespace dtmon::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline bool coin(Rng& rng, int percent = 50) { return uniform(rng, 0, 99) < percent; }

/// Components 1..n, each owning actions named <letter><k>.
inline Alphabet random_alphabet(Rng& rng, int components, int max_actions = 2) {
  Alphabet a;
  for (int c = 1; c <= components; ++c) {
    const auto n = uniform(rng, 1, max_actions);
    for (int k = 0; k < n; ++k) a.add(std::string(1, char('a' + c - 1)) + std::to_string(k), c);
  }
  a.set_components(components);
  return a;
}

/// Observation-like ATW: per component increasing timestamps, widened by
/// `skew`, merged.
inline ApproxTimedWord random_atw(Rng& rng, const Alphabet& alphabet, int events, Ticks max_tick, Ticks skew) {
  std::vector<TimedWord> per(static_cast<std::size_t>(alphabet.components()) + 1);
  std::vector<Ticks> last(per.size(), -1);
  for (int k = 0; k < events; ++k) {
    const auto& act = alphabet.actions()[static_cast<std::size_t>(uniform(rng, 0, std::int64_t(alphabet.actions().size()) - 1))];
    const auto c = static_cast<std::size_t>(act.component);
    if (last[c] >= max_tick) continue;
    last[c] = uniform(rng, last[c] + 1, std::max(last[c] + 1, max_tick));
    per[c].events.push_back({act, last[c]});
  }
  ApproxTimedWord out;
  for (std::size_t c = 1; c < per.size(); ++c) out = tensor(out, approximate(per[c], skew));
  return out;
}

/// Deterministic, complete, F-absorbing automaton with diagonal-free guards.
inline TimedAutomaton random_automaton(Rng& rng, const Alphabet& alphabet, int max_locations = 4, int max_clocks = 2,
                                       Ticks max_const = 3, Ticks resolution = 1) {
  const auto n_loc = static_cast<std::size_t>(uniform(rng, 2, max_locations));
  const auto n_clk = static_cast<std::size_t>(uniform(rng, 1, max_clocks));
  std::vector<std::string> clocks, locations;
  for (std::size_t k = 0; k < n_clk; ++k) clocks.push_back(std::string(1, char('x' + k)));
  for (std::size_t k = 0; k < n_loc; ++k) locations.push_back("l" + std::to_string(k));
  std::vector<bool> final(n_loc, false);
  for (std::size_t k = 1; k < n_loc; ++k) final[k] = coin(rng, 35);
  std::vector<LocationId> finals, all;
  for (std::size_t k = 0; k < n_loc; ++k) {
    all.push_back(k);
    if (final[k]) finals.push_back(k);
  }
  auto pick = [&](const std::vector<LocationId>& v) { return v[static_cast<std::size_t>(uniform(rng, 0, std::int64_t(v.size()) - 1))]; };
  auto resets = [&] {
    std::vector<std::size_t> r;
    for (std::size_t x = 1; x <= n_clk; ++x)
      if (coin(rng, 35)) r.push_back(x);
    return r;
  };
  std::vector<Transition> ts;
  for (LocationId l = 0; l < n_loc; ++l)
    for (std::size_t a = 0; a < alphabet.actions().size(); ++a) {
      const auto& targets = final[l] ? finals : all;
      if (coin(rng, 30)) {
        ts.push_back({l, pick(targets), a, {}, resets()});
        continue;
      }
      const auto x = static_cast<std::size_t>(uniform(rng, 1, std::int64_t(n_clk)));
      const Ticks c = uniform(rng, 0, max_const) * resolution;
      const bool closed_low = coin(rng);
      ts.push_back({l, pick(targets), a, {{x, std::nullopt, closed_low ? CmpOp::Le : CmpOp::Lt, c}}, resets()});
      ts.push_back({l, pick(targets), a, {{x, std::nullopt, closed_low ? CmpOp::Gt : CmpOp::Ge, c}}, resets()});
    }
  return TimedAutomaton(resolution, clocks, alphabet, locations, 0, final, ts);
}

/// Script with up to `max_events` per component at gaps in [gap_lo, gap_hi]
/// and clock offsets within skew/2. Delays are uniform with the default bound.
inline Scenario random_scenario(Rng& rng, const Alphabet& al, Ticks resolution, Ticks skew, int max_events,
                                Ticks gap_lo, Ticks gap_hi) {
  Scenario s;
  s.resolution = resolution;
  s.skew = skew;
  s.seed = rng();
  for (int c = 1; c <= al.components(); ++c) {
    ComponentScript script;
    std::vector<Action> own;
    for (const auto& a : al.actions())
      if (a.component == c) own.push_back(a);
    Ticks t = 0;
    for (auto k = uniform(rng, 0, max_events); k > 0; --k) {
      t += uniform(rng, gap_lo, gap_hi);
      script.events.push_back({own[static_cast<std::size_t>(uniform(rng, 0, static_cast<Ticks>(own.size()) - 1))], t});
    }
    Ticks from = 0;
    for (auto k = uniform(rng, 0, 3); k > 0; --k) {
      script.offsets.push_back({from, uniform(rng, -skew / 2, skew / 2)});
      from += uniform(rng, gap_lo, 3 * gap_hi);
    }
    s.components.push_back(script);
  }
  return s;
}

}  // namespace dtmon::testing
