#pragma once

// One monitor: jtmin bookkeeping, the CS structure and the verdict.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtmon/automaton.hpp"
#include "dtmon/words.hpp"

namespace dtmon {

enum class Verdict { Pending, PTrue, PFalse, True, False, Inconc };

bool is_definitive(Verdict v);
std::string to_string(Verdict v);
/// Throws ValidationError for unknown names.
Verdict verdict_from_string(const std::string& name);
/// a ≲ b in the verdict preorder.
bool verdict_leq(Verdict a, Verdict b);
Verdict verdict_from_flags(bool inev, bool never, bool other);

/// Last known local timestamp per monitor (1-based ids), ordered by
/// (timestamp, id).
class JTmin {
 public:
  struct Entry {
    int monitor;
    Ticks timestamp;

    auto operator<=>(const Entry&) const = default;
  };

  explicit JTmin(int monitors);

  /// Throws AssumptionViolation("fifo-channels") when `timestamp` regresses.
  void update(int monitor, Ticks timestamp);
  Ticks tmin1() const { return entries_.front().timestamp; }
  Ticks timestamp_of(int monitor) const;
  const std::vector<Entry>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }

 private:
  std::vector<Entry> entries_;
};

struct CsEntry {
  ConfigSet configs;
  ApproxTimedWord remainder;
};
using Cs = std::vector<CsEntry>;

/// {(up{(ℓ₀,0,0)}; ε)}
Cs initial_cs(const TimedAutomaton& ta);
/// Every remainder becomes remainder ⊗ events.
Cs cs_add_events(Cs cs, const ApproxTimedWord& events);
/// Decomposes every remainder at `horizon` and advances the configurations
/// over the kept part. Empty entries are dropped, equal ones merged.
Cs cs_next(const TimedAutomaton& ta, const Cs& cs, Ticks horizon, std::size_t cap = kDefaultEnumerationCap);
/// Union of the entries' configurations at abs = horizon. May be empty.
ConfigSet cs_state(const TimedAutomaton& ta, const Cs& cs, Ticks horizon);
/// Removes entries equal (semantically for configs, syntactically for the
/// remainder) to an earlier one.
void cs_dedup(Cs& cs);

/// Observations sent by one monitor: actions sharing one local timestamp.
/// An empty action list is a heartbeat.
struct Message {
  int source = 0;
  Ticks timestamp = 0;
  std::vector<Action> actions;
  std::uint64_t seq = 0;
};

struct TimelineRecord {
  int monitor = 0;
  Ticks local_time = 0;
  Ticks tmin1 = 0;
  Verdict verdict = Verdict::Pending;
  bool definitive = false;
};

class Monitor {
 public:
  Monitor(int id, int monitors, Ticks skew, std::shared_ptr<const Property> property,
          std::size_t cap = kDefaultEnumerationCap);

  /// Processes one message; returns a record when the frontier advanced.
  /// `local_time` is the receiver's clock at delivery.
  std::optional<TimelineRecord> on_receive(const Message& message, Ticks local_time);

  int id() const { return id_; }
  Ticks skew() const { return skew_; }
  Verdict verdict() const { return verdict_; }
  bool terminated() const { return terminated_; }
  std::optional<Ticks> definitive_at() const { return definitive_at_; }
  Ticks tmin() const { return tmin_; }
  /// Current safe frontier tmin - skew.
  Ticks frontier() const { return tmin_ - skew_; }
  const JTmin& jtmin() const { return jtmin_; }
  const Cs& cs() const { return cs_; }
  Flags flags() const { return flags_; }
  const Property& property() const { return *property_; }
  /// Configurations compatible with everything processed, at the frontier.
  ConfigSet state() const;

 private:
  int id_;
  Ticks skew_;
  std::shared_ptr<const Property> property_;
  std::size_t cap_;
  Cs cs_;
  Ticks tmin_;
  JTmin jtmin_;
  Flags flags_;
  Verdict verdict_ = Verdict::Pending;
  bool terminated_ = false;
  bool advanced_ = false;
  std::optional<Ticks> definitive_at_;
};

}  // namespace dtmon
