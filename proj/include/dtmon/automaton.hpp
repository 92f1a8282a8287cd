#pragma once

// Deterministic complete timed automata with an extra never-reset clock for
// the absolute date, their symbolic successor operators, and the offline
// computation of Inev(F) / Never(F).

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtmon/time.hpp"
#include "dtmon/words.hpp"
#include "dtmon/zones.hpp"

namespace dtmon {

using LocationId = std::size_t;

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

/// `lhs ⋈ constant` or `lhs - rhs ⋈ constant`. Clock indices are DBM
/// indices (1-based); the constant is in ticks.
struct ClockConstraint {
  std::size_t lhs = 1;
  std::optional<std::size_t> rhs;
  CmpOp op = CmpOp::Le;
  Ticks constant = 0;
};

struct Transition {
  LocationId from = 0;
  LocationId to = 0;
  std::size_t action = 0;  ///< index into the alphabet
  std::vector<ClockConstraint> guard;
  std::vector<std::size_t> reset;  ///< DBM clock indices
};

/// How Inev/Never are interpreted for the automaton.
enum class PropertyMode {
  Absorbing,  ///< F is closed under transitions; both sets are computed
  NeverOnly,  ///< F was not absorbing; a seen-F product was built, Inev is not computed
};

class TimedAutomaton {
 public:
  TimedAutomaton(Ticks resolution, std::vector<std::string> clocks, Alphabet alphabet,
                 std::vector<std::string> locations, LocationId initial, std::vector<bool> final,
                 std::vector<Transition> transitions, PropertyMode mode = PropertyMode::Absorbing);

  Ticks resolution() const { return resolution_; }
  const std::vector<std::string>& clocks() const { return clocks_; }
  std::size_t clock_count() const { return clocks_.size(); }
  /// Automaton clocks plus the reference clock and the absolute-date clock.
  std::size_t dim() const { return clocks_.size() + 2; }
  std::size_t abs_index() const { return clocks_.size() + 1; }
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<std::string>& locations() const { return locations_; }
  std::size_t location_count() const { return locations_.size(); }
  LocationId initial() const { return initial_; }
  bool is_final(LocationId l) const { return final_.at(l); }
  const std::vector<bool>& final_set() const { return final_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  /// Indices of transitions leaving `from` labelled `action`.
  const std::vector<std::size_t>& outgoing(LocationId from, std::size_t action) const;
  PropertyMode mode() const { return mode_; }
  /// Every transition leaving F enters F.
  bool final_absorbing() const;
  std::optional<LocationId> find_location(const std::string& name) const;

  /// Guard as a zone over the full dimension (abs unconstrained).
  Dbm guard_zone(const Transition& t) const;
  /// Guard as a zone over automaton clocks only (dimension clock_count()+1).
  Dbm guard_zone_clocks(const Transition& t) const;
  /// Largest constant compared against each clock (index 0 unused).
  std::vector<Ticks> max_constants() const;
  /// Names for debug printing: "0", clocks..., "abs".
  std::vector<std::string> dbm_names() const;

 private:
  Ticks resolution_;
  std::vector<std::string> clocks_;
  Alphabet alphabet_;
  std::vector<std::string> locations_;
  LocationId initial_;
  std::vector<bool> final_;
  std::vector<Transition> transitions_;
  PropertyMode mode_;
  std::vector<std::vector<std::vector<std::size_t>>> outgoing_;
};

struct LoadOptions {
  /// Accept non-absorbing F by building the seen-F product (Never-only).
  bool allow_non_absorbing = false;
  /// Route guard gaps to a synthesised non-final sink instead of failing.
  bool auto_complete = false;
  std::size_t max_symbolic_states = 100'000;
};

/// Parses and validates an automaton document; `warnings` receives notes
/// about auto-completion or the seen-F product.
TimedAutomaton load_automaton(const nlohmann::json& doc, const LoadOptions& options = {},
                              std::vector<std::string>* warnings = nullptr);
TimedAutomaton load_automaton_file(const std::string& path, const LoadOptions& options = {},
                                   std::vector<std::string>* warnings = nullptr);

/// Zone-wise determinism check; throws ValidationError with a witness.
void check_deterministic(const TimedAutomaton& ta);

struct CompletenessGap {
  LocationId location;
  std::size_t action;
  Federation missing;  ///< reachable valuations (automaton clocks) with no enabled transition
};

/// Gaps of the guard union against the forward-reachable zones.
std::vector<CompletenessGap> completeness_gaps(const TimedAutomaton& ta, std::size_t max_states = 100'000);

/// Copy of `ta` with a fresh non-final sink receiving every (location,
/// action) guard gap. Returns `ta` unchanged when complete.
TimedAutomaton complete_with_sink(const TimedAutomaton& ta, std::size_t max_states = 100'000);

/// Seen-F product: every location gets a copy reached after visiting F; the
/// copies form the new (absorbing) final set.
TimedAutomaton seen_product(const TimedAutomaton& ta);

/// Symbolic set of configurations (location, clocks, abs).
class ConfigSet {
 public:
  ConfigSet() = default;
  explicit ConfigSet(std::size_t dim, std::size_t abs_index) : dim_(dim), abs_(abs_index) {}

  /// {(ℓ₀, 0, 0)}
  static ConfigSet initial(const TimedAutomaton& ta);
  /// Every location over all valuations.
  static ConfigSet universe(const TimedAutomaton& ta);

  std::size_t dim() const { return dim_; }
  std::size_t abs_index() const { return abs_; }
  bool is_empty() const { return zones_.empty(); }
  const std::map<LocationId, Federation>& zones() const { return zones_; }
  const Federation* find(LocationId l) const;

  void add(LocationId l, const Dbm& zone);
  void add(LocationId l, const Federation& fed);
  ConfigSet& unite(const ConfigSet& other);
  ConfigSet& up();
  ConfigSet& fix_abs(Ticks date);

  ConfigSet intersection(const ConfigSet& other) const;
  ConfigSet difference(const ConfigSet& other) const;
  bool intersects(const ConfigSet& other) const;
  bool includes(const ConfigSet& other) const;
  bool equals(const ConfigSet& other) const { return includes(other) && other.includes(*this); }

  /// Membership of (l, point); point holds all DBM coordinates scaled by den.
  bool contains_scaled(LocationId l, std::span<const std::int64_t> point, std::int64_t den) const;

  std::string to_string(const TimedAutomaton& ta) const;

 private:
  std::size_t dim_ = 0;
  std::size_t abs_ = 0;
  std::map<LocationId, Federation> zones_;
};

/// Successors by one event whose date lies in `interval`; not delay-closed.
ConfigSet after_event(const TimedAutomaton& ta, const ConfigSet& set, const Action& action,
                      const TimeInterval& interval);
/// Fold of after_event over the events, without the trailing delay.
ConfigSet after_ordered_noclose(const TimedAutomaton& ta, const ConfigSet& set, const ApproxTimedWord& word);
/// S after ⟨ν⟩: fold of after_event followed by delay closure.
ConfigSet after_ordered(const TimedAutomaton& ta, const ConfigSet& set, const ApproxTimedWord& word);
/// Exact-date run from `start` with final delay to `end`. Requires
/// firstt(word) >= start and lastt(word) <= end.
ConfigSet after_word(const TimedAutomaton& ta, const ConfigSet& set, const TimedWord& word, Ticks start,
                     Ticks end);

struct PropertySets {
  ConfigSet inev;
  ConfigSet never;
  PropertyMode mode = PropertyMode::Absorbing;
};

/// Configurations that have not visited F and cannot reach it (abs free).
ConfigSet compute_never(const TimedAutomaton& ta, std::size_t max_iterations = 100'000);
/// Configurations from which every infinite continuation enters F (abs
/// free). Requires PropertyMode::Absorbing.
ConfigSet compute_inev(const TimedAutomaton& ta, std::size_t max_iterations = 100'000);
PropertySets precompute(const TimedAutomaton& ta, std::size_t max_iterations = 100'000);

/// Intersection flags of a state set with Inev, Never and the rest.
struct Flags {
  bool inev = false;
  bool never = false;
  bool other = false;

  auto operator<=>(const Flags&) const = default;
};

/// Throws AssumptionViolation for an empty set.
Flags classify(const ConfigSet& state, const PropertySets& sets);

/// Automaton plus its precomputed sets, shared by monitors.
struct Property {
  TimedAutomaton automaton;
  PropertySets sets;
};

std::shared_ptr<const Property> make_property(TimedAutomaton ta);

// Sidecar cache of precomputed sets.
nlohmann::json property_sets_to_json(const PropertySets& sets, const std::string& content_hash);
/// nullopt when the stored hash differs from `content_hash`.
std::optional<PropertySets> property_sets_from_json(const nlohmann::json& doc, const TimedAutomaton& ta,
                                                    const std::string& content_hash);

}  // namespace dtmon
