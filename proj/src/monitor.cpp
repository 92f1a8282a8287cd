#include "dtmon/monitor.hpp"

#include <algorithm>

#include "dtmon/error.hpp"

namespace dtmon {

bool is_definitive(Verdict v) { return v == Verdict::True || v == Verdict::False || v == Verdict::Inconc; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pending: return "Pending";
    case Verdict::PTrue: return "PTrue";
    case Verdict::PFalse: return "PFalse";
    case Verdict::True: return "True";
    case Verdict::False: return "False";
    case Verdict::Inconc: return "Inconc";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& name) {
  for (Verdict v : {Verdict::Pending, Verdict::PTrue, Verdict::PFalse, Verdict::True, Verdict::False,
                    Verdict::Inconc})
    if (to_string(v) == name) return v;
  throw ValidationError("unknown verdict '" + name + "'");
}

bool verdict_leq(Verdict a, Verdict b) {
  if (a == b || a == Verdict::Pending) return true;
  switch (a) {
    case Verdict::PTrue: return b == Verdict::True || b == Verdict::Inconc;
    case Verdict::PFalse: return b == Verdict::False || b == Verdict::Inconc;
    default: return false;
  }
}

Verdict verdict_from_flags(bool inev, bool never, bool other) {
  if (inev && never) return Verdict::Inconc;
  if (inev) return other ? Verdict::PTrue : Verdict::True;
  if (never) return other ? Verdict::PFalse : Verdict::False;
  return Verdict::Pending;
}

// --- JTmin ----------------------------------------------------------------------

JTmin::JTmin(int monitors) {
  if (monitors < 1) throw ValidationError("at least one monitor is required");
  for (int j = 1; j <= monitors; ++j) entries_.push_back({j, 0});
}

Ticks JTmin::timestamp_of(int monitor) const {
  for (const auto& e : entries_)
    if (e.monitor == monitor) return e.timestamp;
  throw ValidationError("unknown monitor " + std::to_string(monitor));
}

void JTmin::update(int monitor, Ticks timestamp) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.monitor == monitor; });
  if (it == entries_.end()) throw ValidationError("unknown monitor " + std::to_string(monitor));
  if (timestamp < it->timestamp)
    throw AssumptionViolation("fifo-channels", "timestamp from monitor " + std::to_string(monitor) +
                                                   " went back from " + std::to_string(it->timestamp) + " to " +
                                                   std::to_string(timestamp));
  it->timestamp = timestamp;
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return std::pair(a.timestamp, a.monitor) < std::pair(b.timestamp, b.monitor);
  });
}

// --- CS ---------------------------------------------------------------------------

Cs initial_cs(const TimedAutomaton& ta) {
  ConfigSet s = ConfigSet::initial(ta);
  s.up();
  return {CsEntry{std::move(s), {}}};
}

Cs cs_add_events(Cs cs, const ApproxTimedWord& events) {
  if (events.empty()) return cs;
  for (auto& e : cs) e.remainder = tensor(e.remainder, events);
  return cs;
}

void cs_dedup(Cs& cs) {
  Cs out;
  for (auto& e : cs) {
    if (e.configs.is_empty()) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const CsEntry& o) {
      return o.remainder == e.remainder && o.configs.equals(e.configs);
    });
    if (!dup) out.push_back(std::move(e));
  }
  cs = std::move(out);
}

Cs cs_next(const TimedAutomaton& ta, const Cs& cs, Ticks horizon, std::size_t cap) {
  Cs out;
  std::size_t produced = 0;
  for (const auto& entry : cs) {
    for (auto& d : decompose(entry.remainder, horizon, cap)) {
      if (++produced > cap) throw ResourceLimit("CS update exceeds cap " + std::to_string(cap));
      ConfigSet next = after_ordered(ta, entry.configs, d.kept);
      if (next.is_empty()) continue;
      out.push_back({std::move(next), std::move(d.remainder)});
    }
  }
  cs_dedup(out);
  return out;
}

ConfigSet cs_state(const TimedAutomaton& ta, const Cs& cs, Ticks horizon) {
  ConfigSet out(ta.dim(), ta.abs_index());
  for (const auto& e : cs) {
    ConfigSet s = e.configs;
    s.fix_abs(horizon);
    out.unite(s);
  }
  return out;
}

// --- Monitor --------------------------------------------------------------------

Monitor::Monitor(int id, int monitors, Ticks skew, std::shared_ptr<const Property> property, std::size_t cap)
    : id_(id), skew_(skew), property_(std::move(property)), cap_(cap), tmin_(skew), jtmin_(monitors) {
  if (id < 1 || id > monitors) throw ValidationError("monitor id out of range");
  if (skew < 0) throw ValidationError("skew must be non-negative");
  if (!property_) throw ValidationError("monitor needs a property");
  const auto& ta = property_->automaton;
  cs_ = initial_cs(ta);
  flags_ = classify(ConfigSet::initial(ta), property_->sets);
  verdict_ = verdict_from_flags(flags_.inev, flags_.never, flags_.other);
}

ConfigSet Monitor::state() const { return cs_state(property_->automaton, cs_, frontier()); }

std::optional<TimelineRecord> Monitor::on_receive(const Message& message, Ticks local_time) {
  const auto& ta = property_->automaton;
  if (message.source < 1 || message.source > jtmin_.size())
    throw ValidationError("message from unknown monitor " + std::to_string(message.source));
  if (!message.actions.empty() && advanced_ && message.timestamp <= tmin_)
    throw AssumptionViolation("frontier-safety", "event stamped " + std::to_string(message.timestamp) +
                                                     " arrived after the frontier passed it");
  jtmin_.update(message.source, message.timestamp);
  if (terminated_) return std::nullopt;

  TimedWord observed;
  for (const auto& a : message.actions) {
    const Action* known = ta.alphabet().find(a.name);
    if (!known) throw ValidationError("unknown action '" + a.name + "'");
    if (known->component != message.source)
      throw AssumptionViolation("disjoint-alphabets",
                                "action '" + a.name + "' reported by monitor " + std::to_string(message.source));
    observed.events.push_back({*known, message.timestamp});
  }
  cs_ = cs_add_events(std::move(cs_), approximate(observed, skew_));

  const Ticks tmin1 = jtmin_.tmin1();
  if (tmin1 <= tmin_) return std::nullopt;
  tmin_ = tmin1;
  advanced_ = true;
  cs_ = cs_next(ta, cs_, frontier(), cap_);
  const Flags now = classify(state(), property_->sets);
  flags_.inev = flags_.inev || now.inev;
  flags_.never = flags_.never || now.never;
  flags_.other = flags_.other && now.other;
  verdict_ = verdict_from_flags(flags_.inev, flags_.never, flags_.other);
  if (is_definitive(verdict_)) {
    terminated_ = true;
    definitive_at_ = local_time;
  }
  return TimelineRecord{id_, local_time, tmin1, verdict_, is_definitive(verdict_)};
}

}  // namespace dtmon
