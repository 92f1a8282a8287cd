#pragma once

// Timed words, approximate timed words and the syntactic operators on them.

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtmon/time.hpp"

namespace dtmon {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// An action together with the (1-based) component that performs it.
struct Action {
  std::string name;
  int component = 0;

  auto operator<=>(const Action&) const = default;
};

/// Action names with their owning components. Names are globally unique.
class Alphabet {
 public:
  /// Registers `name` for `component` (>= 1). Re-registering the same pair
  /// is a no-op; a name owned by another component is a ValidationError.
  const Action& add(const std::string& name, int component);
  const Action* find(const std::string& name) const;
  const Action& at(const std::string& name) const;
  /// Index of the action in registration order.
  std::size_t index_of(const std::string& name) const;
  const std::vector<Action>& actions() const { return actions_; }
  int components() const { return components_; }
  void set_components(int n);

 private:
  std::vector<Action> actions_;
  std::map<std::string, std::size_t> index_;
  int components_ = 0;
};

struct Event {
  Action action;
  Ticks date = 0;

  auto operator<=>(const Event&) const = default;
};

struct TimedWord {
  std::vector<Event> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
  /// Dates of the first and last events; 0 for the empty word.
  Ticks firstt() const { return events.empty() ? 0 : events.front().date; }
  Ticks lastt() const { return events.empty() ? 0 : events.back().date; }

  auto operator<=>(const TimedWord&) const = default;
};

/// Throws OrderingError unless dates are non-negative and non-decreasing.
void validate(const TimedWord& word);

struct ApproxEvent {
  Action action;
  TimeInterval interval;

  auto operator<=>(const ApproxEvent&) const = default;
};

struct ApproxTimedWord {
  std::vector<ApproxEvent> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }

  auto operator<=>(const ApproxTimedWord&) const = default;
};

std::string to_string(const TimedWord& word);
std::string to_string(const ApproxTimedWord& word);

// --- timed words -----------------------------------------------------------

/// Subsequence of events owned by `component`. Throws for component < 1.
TimedWord project(const TimedWord& word, int component);

/// Stable merge by date; equal dates are ordered by component index, then
/// by source (left operand first).
TimedWord tensor(const TimedWord& lhs, const TimedWord& rhs);

/// Events whose date belongs to `interval`.
TimedWord restrict(const TimedWord& word, const TimeInterval& interval);

/// lhs·rhs; throws OrderingError when lastt(lhs) > firstt(rhs).
TimedWord concat(const TimedWord& lhs, const TimedWord& rhs);

/// Each (a,t) becomes (a, [max(0,t-skew), t+skew]). Throws for skew < 0.
ApproxTimedWord approximate(const TimedWord& word, Ticks skew);

// --- approximate timed words ------------------------------------------------

/// Merge of two ATWs ordered by upper interval bound (+inf last), ties by
/// component then source. For skew-widened observations this coincides with
/// merging the underlying timed words.
ApproxTimedWord tensor(const ApproxTimedWord& lhs, const ApproxTimedWord& rhs);

/// Componentwise intersection; may yield empty intervals.
ApproxTimedWord intersect(const ApproxTimedWord& word, const TimeInterval& interval);

ApproxTimedWord permute(const ApproxTimedWord& word, std::span<const std::size_t> order);

/// Number of permutations preserving per-component order (multinomial), or
/// nullopt on overflow of `cap`.
std::optional<std::size_t> count_valid_permutations(const ApproxTimedWord& word, std::size_t cap);

/// Calls `visit(order)` for every permutation of `word` that keeps the events
/// of each component in their original relative order. `order[k]` is the
/// index in `word` of the k-th event of the permuted word. Enumeration order
/// is lexicographic in `order`.
void for_each_valid_permutation(const ApproxTimedWord& word,
                                const std::function<void(std::span<const std::size_t>)>& visit);

/// All such permutations; throws ResourceLimit past `cap`.
std::vector<std::vector<std::size_t>> valid_permutations(const ApproxTimedWord& word,
                                                         std::size_t cap = kDefaultEnumerationCap);

/// sub ⪯_I word: `sub` is the subsequence of kept events, every dropped event
/// may lie outside I, every kept event may lie inside I, and on each
/// component the kept events form a prefix.
bool is_subword_conditioned(const ApproxTimedWord& sub, const ApproxTimedWord& word,
                            const TimeInterval& interval);

/// ν|T: conditioned subwords for [0,T], intersected with [0,T], sorted and
/// deduplicated.
std::vector<ApproxTimedWord> restrict(const ApproxTimedWord& word, Ticks horizon,
                                      std::size_t cap = kDefaultEnumerationCap);

struct Decomposition {
  ApproxTimedWord kept;       ///< f(ν₁): an allowed ordering of the kept events
  ApproxTimedWord remainder;  ///< ν₂: dropped events in original order

  auto operator<=>(const Decomposition&) const = default;
};

/// Decomp(ν, T). Candidate count above `cap` raises ResourceLimit.
std::vector<Decomposition> decompose(const ApproxTimedWord& word, Ticks horizon,
                                     std::size_t cap = kDefaultEnumerationCap);

/// Same action sequence and every date inside its interval.
bool ordered_member(const ApproxTimedWord& word, const TimedWord& candidate);

/// Ordered membership for some per-component-order-preserving permutation.
bool unordered_member(const ApproxTimedWord& word, const TimedWord& candidate);

}  // namespace dtmon
