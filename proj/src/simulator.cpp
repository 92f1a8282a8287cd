#include "dtmon/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <thread>

#include "dtmon/error.hpp"

namespace dtmon {

namespace {

Ticks to_ticks(const nlohmann::json& v, Ticks resolution) {
  if (!v.is_number()) throw ValidationError("expected a number, got " + v.dump());
  return static_cast<Ticks>(std::llround(v.get<double>() * static_cast<double>(resolution)));
}

double to_units(Ticks t, Ticks resolution) { return static_cast<double>(t) / static_cast<double>(resolution); }

ChannelKey channel_key(const nlohmann::json& j) {
  return {j.at("src").get<int>(), j.at("dst").get<int>(), j.at("seq").get<std::uint64_t>()};
}

std::vector<OffsetStep> random_offsets(std::mt19937_64& rng, Ticks skew, Ticks every, Ticks until) {
  std::vector<OffsetStep> steps;
  const auto span = static_cast<std::uint64_t>(2 * skew + 1);
  for (Ticks from = 0; from <= until; from += std::max<Ticks>(every, 1))
    steps.push_back({from, static_cast<Ticks>(rng() % span) - skew});
  return steps;
}

}  // namespace

Scenario load_scenario(const nlohmann::json& doc, const Alphabet& alphabet,
                       std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
  try {
    Scenario s;
    s.resolution = doc.value("resolution", kDefaultResolution);
    if (s.resolution <= 0) throw ValidationError("resolution must be positive");
    const Ticks res = s.resolution;
    if (!doc.contains("skew")) throw ValidationError("scenario lacks field 'skew'");
    s.skew = to_ticks(doc.at("skew"), res);
    s.seed = seed_override.value_or(doc.value("seed", std::uint64_t{0}));
    if (doc.contains("heartbeat")) s.heartbeat = to_ticks(doc.at("heartbeat"), res);
    if (doc.contains("horizon")) s.horizon = to_ticks(doc.at("horizon"), res);
    std::mt19937_64 rng(s.seed);

    for (const auto& cj : doc.at("components")) {
      const int comp = static_cast<int>(s.components.size()) + 1;
      ComponentScript c;
      for (const auto& ej : cj.value("events", nlohmann::json::array()))
        c.events.push_back({alphabet.at(ej.at("action").get<std::string>()), to_ticks(ej.at("date"), res)});
      if (cj.contains("generate")) {
        const auto& g = cj.at("generate");
        const auto count = g.at("count").get<int>();
        const Ticks gap_min = std::max<Ticks>(1, to_ticks(g.value("gap_min", nlohmann::json(0.0)), res));
        const Ticks gap_max = std::max(gap_min, to_ticks(g.at("gap_max"), res));
        const Ticks start = to_ticks(g.value("start", nlohmann::json(0.0)), res);
        std::vector<Action> mine;
        for (const auto& a : alphabet.actions())
          if (a.component == comp) mine.push_back(a);
        if (mine.empty() && count > 0) throw ValidationError("component " + std::to_string(comp) + " has no actions");
        Ticks date = c.events.empty() ? start : c.events.back().date;
        for (int k = 0; k < count; ++k) {
          date += gap_min + static_cast<Ticks>(rng() % static_cast<std::uint64_t>(gap_max - gap_min + 1));
          c.events.push_back({mine[rng() % mine.size()], date});
        }
      }
      if (cj.contains("offsets")) {
        const auto& oj = cj.at("offsets");
        if (oj.is_string()) {
          if (oj.get<std::string>() != "random") throw ValidationError("offsets must be a list or \"random\"");
          const Ticks last = c.events.empty() ? 0 : c.events.back().date;
          const Ticks until = s.horizon.value_or(last + 4 * s.skew + res);
          const Ticks every = to_ticks(cj.value("offset_every", nlohmann::json(1.0)), res);
          c.offsets = random_offsets(rng, s.skew, every, until);
        } else {
          for (const auto& st : oj) c.offsets.push_back({to_ticks(st.at("from"), res), to_ticks(st.at("offset"), res)});
        }
      }
      s.components.push_back(std::move(c));
    }

    if (doc.contains("delay")) {
      const auto& dj = doc.at("delay");
      const auto kind = dj.value("kind", std::string("uniform"));
      if (kind == "fixed") {
        s.delay.kind = DelayModel::Kind::Fixed;
        s.delay.value = to_ticks(dj.at("value"), res);
      } else if (kind == "uniform") {
        s.delay.kind = DelayModel::Kind::Uniform;
        if (dj.contains("max")) s.delay.max = to_ticks(dj.at("max"), res);
      } else if (kind == "scripted") {
        s.delay.kind = DelayModel::Kind::Scripted;
        s.delay.value = to_ticks(dj.value("default", nlohmann::json(0.0)), res);
        for (const auto& m : dj.value("messages", nlohmann::json::array()))
          s.delay.scripted[channel_key(m)] = to_ticks(m.at("delay"), res);
      } else {
        throw ValidationError("unknown delay kind '" + kind + "'");
      }
    }
    for (const auto& d : doc.value("deliveries", nlohmann::json::array()))
      s.deliveries[channel_key(d)] = to_ticks(d.at("at"), res);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path, const Alphabet& alphabet,
                            std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("scenario file '" + path + "': " + e.what());
  }
  return load_scenario(doc, alphabet, seed_override);
}

nlohmann::json scenario_to_json(const Scenario& s) {
  const Ticks res = s.resolution;
  auto u = [&](Ticks t) { return to_units(t, res); };
  nlohmann::json doc{{"resolution", res}, {"skew", u(s.skew)}, {"seed", s.seed}};
  if (s.heartbeat) doc["heartbeat"] = u(*s.heartbeat);
  if (s.horizon) doc["horizon"] = u(*s.horizon);
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : s.components) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : c.events) events.push_back({{"action", e.action.name}, {"date", u(e.date)}});
    nlohmann::json offsets = nlohmann::json::array();
    for (const auto& o : c.offsets) offsets.push_back({{"from", u(o.from)}, {"offset", u(o.offset)}});
    comps.push_back({{"events", events}, {"offsets", offsets}});
  }
  doc["components"] = comps;
  nlohmann::json delay;
  switch (s.delay.kind) {
    case DelayModel::Kind::Fixed: delay = {{"kind", "fixed"}, {"value", u(s.delay.value)}}; break;
    case DelayModel::Kind::Uniform:
      delay = {{"kind", "uniform"}};
      if (s.delay.max) delay["max"] = u(*s.delay.max);
      break;
    case DelayModel::Kind::Scripted: {
      delay = {{"kind", "scripted"}, {"default", u(s.delay.value)}};
      nlohmann::json msgs = nlohmann::json::array();
      for (const auto& [k, d] : s.delay.scripted)
        msgs.push_back({{"src", std::get<0>(k)}, {"dst", std::get<1>(k)}, {"seq", std::get<2>(k)}, {"delay", u(d)}});
      delay["messages"] = msgs;
      break;
    }
  }
  doc["delay"] = delay;
  if (!s.deliveries.empty()) {
    nlohmann::json ds = nlohmann::json::array();
    for (const auto& [k, at] : s.deliveries)
      ds.push_back({{"src", std::get<0>(k)}, {"dst", std::get<1>(k)}, {"seq", std::get<2>(k)}, {"at", u(at)}});
    doc["deliveries"] = ds;
  }
  return doc;
}

void validate_scenario(const Scenario& s, const Alphabet& alphabet) {
  if (s.skew < 0) throw ValidationError("skew must be non-negative");
  if (s.components.empty()) throw ValidationError("scenario has no components");
  if (static_cast<int>(s.components.size()) != alphabet.components())
    throw ValidationError("scenario has " + std::to_string(s.components.size()) + " components, property has " +
                          std::to_string(alphabet.components()));
  if (heartbeat_period(s) < 0) throw ValidationError("heartbeat period must be non-negative");
  for (std::size_t i = 0; i < s.components.size(); ++i) {
    const int comp = static_cast<int>(i) + 1;
    const auto& c = s.components[i];
    Ticks prev_from = -1;
    for (const auto& o : c.offsets) {
      if (o.from < 0 || o.from <= prev_from)
        throw ValidationError("component " + std::to_string(comp) + ": offset steps must start at increasing dates");
      prev_from = o.from;
      if (o.offset > s.skew || o.offset < -s.skew)
        throw AssumptionViolation("time-approximation", "component " + std::to_string(comp) + " offset " +
                                                            std::to_string(o.offset) + " exceeds skew " +
                                                            std::to_string(s.skew));
    }
    Ticks prev = -1;
    for (const auto& e : c.events) {
      if (e.date < 0) throw ValidationError("event dates must be non-negative");
      if (e.date <= prev)
        throw AssumptionViolation("strict-local-order",
                                  "component " + std::to_string(comp) + " has events at non-increasing dates");
      prev = e.date;
      const Action* known = alphabet.find(e.action.name);
      if (!known) throw AssumptionViolation("respective-knowledge", "unknown action '" + e.action.name + "'");
      if (known->component != comp)
        throw AssumptionViolation("disjoint-alphabets", "action '" + e.action.name + "' scheduled on component " +
                                                            std::to_string(comp));
    }
  }
  const std::size_t n = s.components.size();
  for (const auto& [k, v] : s.deliveries) {
    const auto [src, dst, seq] = k;
    if (src < 1 || dst < 1 || static_cast<std::size_t>(src) > n || static_cast<std::size_t>(dst) > n || seq < 1)
      throw ValidationError("delivery schedule names an unknown channel");
    if (v < 0) throw ValidationError("delivery dates must be non-negative");
  }
}

Ticks local_time(const Scenario& s, int component, Ticks global) {
  std::vector<OffsetStep> steps = s.components.at(static_cast<std::size_t>(component - 1)).offsets;
  if (steps.empty() || steps.front().from > 0) steps.insert(steps.begin(), {0, 0});
  Ticks best = 0;
  for (std::size_t k = 0; k < steps.size() && steps[k].from <= global; ++k) {
    // segment k covers [from_k, from_{k+1}); its latest tick is from_{k+1} - 1
    const Ticks reach = k + 1 < steps.size() ? std::min(global, steps[k + 1].from - 1) : global;
    best = std::max(best, reach + steps[k].offset);
  }
  return best;
}

Ticks heartbeat_period(const Scenario& s) { return s.heartbeat.value_or(s.skew / 2); }

Ticks horizon(const Scenario& s) {
  if (s.horizon) return *s.horizon;
  Ticks last = 0;
  for (const auto& c : s.components)
    if (!c.events.empty()) last = std::max(last, c.events.back().date);
  return last + 4 * s.skew + s.resolution;
}

namespace {

struct Observation {
  Ticks global;
  Ticks local;
  std::optional<Action> action;
};

Ticks sample_delay(const Scenario& s, std::mt19937_64& rng, const ChannelKey& key) {
  switch (s.delay.kind) {
    case DelayModel::Kind::Fixed: return s.delay.value;
    case DelayModel::Kind::Scripted: {
      auto it = s.delay.scripted.find(key);
      return it == s.delay.scripted.end() ? s.delay.value : it->second;
    }
    case DelayModel::Kind::Uniform: {
      const Ticks max = s.delay.max.value_or(5 * s.skew);
      if (max <= 0) return 0;
      return static_cast<Ticks>(rng() % static_cast<std::uint64_t>(max + 1));
    }
  }
  return 0;
}

}  // namespace

SimTrace plan(const Scenario& s, const Alphabet& alphabet) {
  validate_scenario(s, alphabet);
  SimTrace trace;
  const int n = static_cast<int>(s.components.size());
  const Ticks period = heartbeat_period(s);
  const Ticks end = horizon(s);

  for (int i = 1; i <= n; ++i) trace.global_trace = tensor(trace.global_trace, project(
      TimedWord{s.components[static_cast<std::size_t>(i - 1)].events}, i));

  std::vector<std::vector<std::size_t>> by_source(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) {
    const auto& comp = s.components[static_cast<std::size_t>(i - 1)];
    std::vector<Observation> obs;
    for (const auto& e : comp.events) obs.push_back({e.date, local_time(s, i, e.date), e.action});
    if (period > 0)
      for (Ticks g = period; g <= end; g += period) obs.push_back({g, local_time(s, i, g), std::nullopt});
    std::stable_sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) {
      if (a.global != b.global) return a.global < b.global;
      return a.action.has_value() && !b.action.has_value();
    });
    TimedWord local_word;
    std::uint64_t seq = 0;
    for (std::size_t k = 0; k < obs.size();) {
      SentMessage m;
      m.message.source = i;
      m.message.timestamp = obs[k].local;
      m.message.seq = ++seq;
      std::size_t j = k;
      for (; j < obs.size() && obs[j].local == obs[k].local; ++j) {
        if (!obs[j].action) continue;
        m.message.actions.push_back(*obs[j].action);
        m.global_dates.push_back(obs[j].global);
        local_word.events.push_back({*obs[j].action, obs[j].local});
      }
      m.send_time = obs[j - 1].global;
      by_source[static_cast<std::size_t>(i)].push_back(trace.messages.size());
      trace.messages.push_back(std::move(m));
      k = j;
    }
    trace.observations.push_back(std::move(local_word));
  }

  std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int src = 1; src <= n; ++src) {
    std::vector<Ticks> last(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t idx : by_source[static_cast<std::size_t>(src)]) {
      const auto& m = trace.messages[idx];
      for (int dst = 1; dst <= n; ++dst) {
        const ChannelKey key{src, dst, m.message.seq};
        Ticks at = m.send_time;
        if (auto it = s.deliveries.find(key); it != s.deliveries.end()) {
          at = it->second;
          if (at < m.send_time)
            throw AssumptionViolation("fifo-channels", "scripted delivery precedes its send date");
          if (at < last[static_cast<std::size_t>(dst)])
            throw AssumptionViolation("fifo-channels", "scripted deliveries on channel " + std::to_string(src) +
                                                           "->" + std::to_string(dst) + " overtake each other");
        } else if (dst != src) {
          at = std::max(m.send_time + sample_delay(s, rng, key), last[static_cast<std::size_t>(dst)]);
        }
        last[static_cast<std::size_t>(dst)] = at;
        trace.deliveries.push_back({src, dst, m.message.seq, m.send_time, at, local_time(s, dst, at), idx});
      }
    }
  }
  std::sort(trace.deliveries.begin(), trace.deliveries.end(), [](const Delivery& a, const Delivery& b) {
    return std::tie(a.deliver_time, a.dst, a.src, a.seq) < std::tie(b.deliver_time, b.dst, b.src, b.seq);
  });
  return trace;
}

SimTrace run(const Scenario& s, std::shared_ptr<const Property> property, const RunOptions& options) {
  if (!property) throw ValidationError("run needs a property");
  SimTrace trace = plan(s, property->automaton.alphabet());
  const int n = static_cast<int>(s.components.size());
  std::vector<Monitor> monitors;
  for (int i = 1; i <= n; ++i) monitors.emplace_back(i, n, s.skew, property, options.cap);

  std::vector<std::optional<TimelineRecord>> records(trace.deliveries.size());
  auto process = [&](std::size_t k) {
    const auto& d = trace.deliveries[k];
    const auto& msg = trace.messages[d.message].message;
    records[k] = monitors[static_cast<std::size_t>(d.dst - 1)].on_receive(msg, d.local_time);
  };

  const int threads = std::clamp(options.threads, 1, n);
  if (threads == 1 || options.observer) {
    for (std::size_t k = 0; k < trace.deliveries.size(); ++k) {
      process(k);
      if (options.observer) {
        const auto& d = trace.deliveries[k];
        options.observer(d, trace.messages[d.message].message, monitors[static_cast<std::size_t>(d.dst - 1)],
                         records[k]);
      }
    }
  } else {
    // Monitors are independent: each worker replays the deliveries of its
    // monitors in global order; results are merged by delivery index.
    std::vector<std::pair<std::size_t, std::exception_ptr>> failures(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = 0; k < trace.deliveries.size(); ++k) {
          if ((trace.deliveries[k].dst - 1) % threads != w) continue;
          try {
            process(k);
          } catch (...) {
            failures[static_cast<std::size_t>(w)] = {k, std::current_exception()};
            return;
          }
        }
      });
    for (auto& t : pool) t.join();
    std::optional<std::pair<std::size_t, std::exception_ptr>> first;
    for (auto& f : failures)
      if (f.second && (!first || f.first < first->first)) first = f;
    if (first) std::rethrow_exception(first->second);
  }

  for (auto& r : records)
    if (r) trace.timeline.push_back(*r);
  for (const auto& m : monitors)
    trace.summary.push_back({m.id(), m.verdict(), m.definitive_at(), m.jtmin().tmin1()});
  return trace;
}

}  // namespace dtmon
