#pragma once

// Discrete-event simulation of components with skewed clocks, FIFO channels
// and one monitor per component.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtmon/monitor.hpp"

namespace dtmon {

/// From global date `from` on, local = global + offset (before clamping).
struct OffsetStep {
  Ticks from = 0;
  Ticks offset = 0;
};

struct ComponentScript {
  std::vector<Event> events;        ///< true global dates
  std::vector<OffsetStep> offsets;  ///< sorted by `from`; empty = perfect clock
};

using ChannelKey = std::tuple<int, int, std::uint64_t>;  ///< (src, dst, seq)

struct DelayModel {
  enum class Kind { Fixed, Uniform, Scripted };
  Kind kind = Kind::Uniform;
  Ticks value = 0;            ///< fixed delay, or default for scripted messages
  std::optional<Ticks> max;   ///< uniform upper bound; 5Δ when unset
  std::map<ChannelKey, Ticks> scripted;
};

struct Scenario {
  Ticks resolution = kDefaultResolution;
  Ticks skew = 0;
  std::vector<ComponentScript> components;  ///< component i+1
  DelayModel delay;
  /// Explicit delivery dates; they override the delay model.
  std::map<ChannelKey, Ticks> deliveries;
  std::optional<Ticks> heartbeat;  ///< period; 0 disables; Δ/2 when unset
  std::optional<Ticks> horizon;
  std::uint64_t seed = 0;
};

/// Reads a scenario, generating scripted events where the document asks for
/// generated ones. Time values are in time units, scaled by the resolution.
Scenario load_scenario(const nlohmann::json& doc, const Alphabet& alphabet,
                       std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario load_scenario_file(const std::string& path, const Alphabet& alphabet,
                            std::optional<std::uint64_t> seed_override = std::nullopt);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Throws AssumptionViolation naming the violated assumption.
void validate_scenario(const Scenario& scenario, const Alphabet& alphabet);

/// Local clock of component `component` (1-based) at global date `global`:
/// the running maximum of global + offset, clamped at 0.
Ticks local_time(const Scenario& scenario, int component, Ticks global);
Ticks heartbeat_period(const Scenario& scenario);
Ticks horizon(const Scenario& scenario);

struct SentMessage {
  Message message;
  Ticks send_time = 0;              ///< global date
  std::vector<Ticks> global_dates;  ///< true dates of the carried actions
};

struct Delivery {
  int src = 0;
  int dst = 0;
  std::uint64_t seq = 0;
  Ticks send_time = 0;
  Ticks deliver_time = 0;  ///< global
  Ticks local_time = 0;    ///< receiver clock
  std::size_t message = 0;  ///< index into SimTrace::messages
};

struct MonitorSummary {
  int monitor = 0;
  Verdict verdict = Verdict::Pending;
  std::optional<Ticks> definitive_at;
  Ticks tmin1 = 0;
};

struct SimTrace {
  TimedWord global_trace;
  std::vector<TimedWord> observations;  ///< per component, local timestamps
  std::vector<SentMessage> messages;
  std::vector<Delivery> deliveries;  ///< in processing order
  std::vector<TimelineRecord> timeline;
  std::vector<MonitorSummary> summary;
  std::string config_hash;
};

/// Called after each delivery is processed (single-threaded runs only).
using DeliveryObserver = std::function<void(const Delivery&, const Message&, const Monitor&,
                                            const std::optional<TimelineRecord>&)>;

struct RunOptions {
  int threads = 1;
  std::size_t cap = kDefaultEnumerationCap;
  DeliveryObserver observer;
};

/// Messages and deliveries only, without running monitors.
SimTrace plan(const Scenario& scenario, const Alphabet& alphabet);
SimTrace run(const Scenario& scenario, std::shared_ptr<const Property> property, const RunOptions& options = {});

}  // namespace dtmon
