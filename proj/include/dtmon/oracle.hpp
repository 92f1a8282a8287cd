#pragma once

// Brute-force reference implementations for cross-checking. Nothing here
// calls the zone library, the decomposition code or the after-operators.
//
// Grid argument: all constraints have integer tick constants, so a zone over
// k clocks (abs fixed) differs from another zone on some region, and every
// region contains a point whose coordinates are multiples of 1/(k+1) tick.
// Comparing sets on the grid of step 1/grid_denominator(k) is therefore exact.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dtmon/automaton.hpp"
#include "dtmon/monitor.hpp"
#include "dtmon/words.hpp"

namespace dtmon::oracle {

std::int64_t grid_denominator(std::size_t clocks);

/// Decomposition by enumerating every subset and every permutation.
std::vector<Decomposition> naive_decompose(const ApproxTimedWord& word, Ticks horizon, std::size_t max_events = 8);
/// Kept subwords intersected with [0, horizon], sorted and unique.
std::vector<ApproxTimedWord> naive_restrict(const ApproxTimedWord& word, Ticks horizon,
                                            std::size_t max_events = 8);
/// Candidate matches `word` up to reordering across components: each
/// component's events match that component's events in order.
bool naive_unordered_member(const ApproxTimedWord& word, const TimedWord& candidate);

/// Difference bound with its own arithmetic.
struct Bnd {
  std::int64_t v = 0;
  bool strict = false;
  bool inf = true;
};

/// Difference constraints over event dates for one transition path.
struct PathSystem {
  LocationId location = 0;
  std::vector<std::size_t> reset_node;  ///< per clock (index 0 unused): node of its last reset
  std::size_t end_node = 0;
  std::vector<std::vector<Bnd>> m;  ///< closed; m[i][j] bounds d_i - d_j (scaled)
  std::int64_t den = 1;
};

/// Exact set of configurations reached at date `horizon` by runs from (ℓ₀,0,0)
/// whose events follow one of the given orderings in order.
class ExactState {
 public:
  ExactState(const TimedAutomaton& ta, std::int64_t den) : ta_(&ta), den_(den) {}

  /// Adds all runs reading `word` (events in this order, dates in their
  /// intervals, non-decreasing) and then delaying to `horizon`.
  void add_ordered(const ApproxTimedWord& word, Ticks horizon);
  /// Adds ⟨⟨word|horizon⟩⟩.
  void add_restricted(const ApproxTimedWord& word, Ticks horizon, std::size_t max_events = 8);

  /// `point` holds the automaton clocks (index 0 unused) scaled by den.
  bool contains(LocationId l, std::span<const std::int64_t> point) const;
  bool is_empty() const { return paths_.empty(); }
  std::int64_t den() const { return den_; }
  Ticks horizon() const { return horizon_; }
  std::size_t path_count() const { return paths_.size(); }

  /// Calls visit(l, point) for every grid point of the set.
  template <class F>
  void for_each_point(F&& visit) const;

 private:
  const TimedAutomaton* ta_;
  std::int64_t den_;
  Ticks horizon_ = 0;
  std::vector<PathSystem> paths_;
};

/// Every grid point (scaled clocks, index 0 unused) with clocks in [0, horizon].
std::vector<std::vector<std::int64_t>> grid_points(std::size_t clocks, Ticks horizon, std::int64_t den);

/// Explicit region graph deciding membership in Inev / Never. Guards must be
/// diagonal-free.
class RegionOracle {
 public:
  explicit RegionOracle(const TimedAutomaton& ta);

  bool in_never(LocationId l, std::span<const std::int64_t> point, std::int64_t den);
  bool in_inev(LocationId l, std::span<const std::int64_t> point, std::int64_t den);
  std::size_t explored() const { return nodes_.size(); }

 private:
  struct Region {
    std::vector<std::int64_t> ip;  ///< integer parts; M+1 when above the max constant
    std::vector<int> rank;         ///< 0: zero fraction, >0: order of fractions, -1: above max
    auto operator<=>(const Region&) const = default;
  };
  using Node = std::pair<LocationId, Region>;

  Region region_of(std::span<const std::int64_t> point, std::int64_t den) const;
  void normalize(Region& r) const;
  std::optional<Region> delay_successor(const Region& r) const;
  bool satisfies(const Region& r, const ClockConstraint& c) const;
  std::size_t explore(const Node& start);
  void solve();

  const TimedAutomaton* ta_;
  std::vector<std::int64_t> maxc_;
  std::map<Node, std::size_t> index_;
  std::vector<Node> nodes_;
  std::vector<std::optional<std::size_t>> delay_;
  std::vector<std::vector<std::size_t>> discrete_;
  std::vector<bool> never_;
  std::vector<bool> avoid_;
  bool dirty_ = true;
};

/// Configuration reached by the exact word at `horizon`, clocks in ticks
/// (index 0 unused); nullopt when the run blocks.
struct Concrete {
  LocationId location;
  std::vector<std::int64_t> clocks;
};
std::optional<Concrete> concrete_run(const TimedAutomaton& ta, const TimedWord& word, Ticks horizon);

/// Intersection flags of the set with Inev/Never on the grid.
Flags naive_flags(const ExactState& state, RegionOracle& regions);
/// Verdict after the given update points, folding flags like the monitor.
Verdict naive_verdict(const TimedAutomaton& ta, RegionOracle& regions,
                      const std::vector<std::pair<ApproxTimedWord, Ticks>>& updates);

template <class F>
void ExactState::for_each_point(F&& visit) const {
  for (const auto& p : grid_points(ta_->clock_count(), horizon_, den_))
    for (LocationId l = 0; l < ta_->location_count(); ++l)
      if (contains(l, p)) visit(l, p);
}

}  // namespace dtmon::oracle
