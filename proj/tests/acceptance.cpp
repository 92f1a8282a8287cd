// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dtmon/error.hpp"
#include "dtmon/io.hpp"
#include "dtmon/monitor.hpp"
#include "dtmon/oracle.hpp"
#include "dtmon/simulator.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace dtmon;
using testing::Rng;
using testing::uniform;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string cat(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

// --- monotonicity bookkeeping shared by the simulated suites ---------------

struct MonotonicityLog {
  std::size_t sequences = 0;
  std::size_t violations = 0;

  void check_verdicts(const std::vector<Verdict>& seq) {
    ++sequences;
    for (std::size_t i = 1; i < seq.size(); ++i)
      if (!verdict_leq(seq[i - 1], seq[i])) ++violations;
  }
  void check_flags(const std::vector<Flags>& seq) {
    ++sequences;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const auto &a = seq[i - 1], &b = seq[i];
      if ((a.inev && !b.inev) || (a.never && !b.never) || (!a.other && b.other)) ++violations;
    }
  }
};

MonotonicityLog monotonicity;

/// Per-monitor view of a run: the knowledge at every update point.
struct Observed {
  std::vector<TimedWord> collected;
  std::vector<std::vector<std::pair<ApproxTimedWord, Ticks>>> updates;
  std::vector<std::vector<bool>> state_nonempty;
  std::vector<std::vector<Verdict>> verdicts;
  std::vector<std::vector<Flags>> flags;
};

struct Simulated {
  SimTrace trace;
  Observed seen;
};

Simulated simulate(const Scenario& s, const std::shared_ptr<const Property>& property) {
  const auto n = s.components.size() + 1;
  Observed seen{std::vector<TimedWord>(n), decltype(Observed::updates)(n), decltype(Observed::state_nonempty)(n),
                decltype(Observed::verdicts)(n), decltype(Observed::flags)(n)};
  RunOptions options;
  options.observer = [&](const Delivery& d, const Message& msg, const Monitor& m,
                         const std::optional<TimelineRecord>& rec) {
    const auto i = static_cast<std::size_t>(d.dst);
    if (m.terminated() && !rec) return;
    for (const auto& a : msg.actions) seen.collected[i].events.push_back({a, msg.timestamp});
    std::stable_sort(seen.collected[i].events.begin(), seen.collected[i].events.end(),
                     [](const Event& x, const Event& y) { return x.date < y.date; });
    if (!rec) return;
    seen.updates[i].push_back({approximate(seen.collected[i], s.skew), m.frontier()});
    seen.state_nonempty[i].push_back(!m.state().is_empty());
    seen.verdicts[i].push_back(rec->verdict);
    seen.flags[i].push_back(m.flags());
  };
  Simulated out{run(s, property, options), std::move(seen)};
  for (std::size_t i = 1; i < n; ++i) {
    monotonicity.check_verdicts(out.seen.verdicts[i]);
    monotonicity.check_flags(out.seen.flags[i]);
  }
  return out;
}

std::string timeline_bytes(const SimTrace& t) {
  std::string out;
  for (const auto& r : t.timeline) out += to_json(r).dump() + "\n";
  for (const auto& m : t.summary)
    out += std::to_string(m.monitor) + " " + to_string(m.verdict) + " " + std::to_string(m.tmin1) + "\n";
  return out;
}

// --- 1 ---------------------------------------------------------------------

Outcome example_restriction() {
  std::vector<std::string> failed, notes;
  for (bool shared : {false, true}) {
    Alphabet al;
    const auto a = al.add("a", 1);
    const auto b = al.add("b", 2);
    const auto c = al.add("c", shared ? 2 : 3);
    al.set_components(shared ? 2 : 3);
    const ApproxTimedWord nu{{{a, TimeInterval::closed(1, 3)}, {b, TimeInterval::closed(2, 4)},
                              {c, TimeInterval::closed(3, 5)}}};
    const ApproxTimedWord inter{{{a, TimeInterval::closed(1, 3)}, {b, TimeInterval::closed(2, 3)},
                                 {c, TimeInterval::singleton(3)}}};
    const auto r = restrict(nu, 3);
    if (!shared) {
      if (intersect(nu, TimeInterval::closed(0, 3)) != inter) failed.push_back("intersection");
      std::set<ApproxTimedWord> want;
      for (unsigned mask = 0; mask < 8; ++mask) {
        ApproxTimedWord w;
        for (unsigned k = 0; k < 3; ++k)
          if (mask & (1u << k)) w.events.push_back(inter.events[k]);
        want.insert(w);
      }
      const std::set<ApproxTimedWord> got(r.begin(), r.end());
      notes.push_back("restriction has " + std::to_string(got.size()) + " of 8 listed words");
      if (got != want) failed.push_back("eight-word restriction");
    } else {
      const ApproxTimedWord ac{{inter.events[0], inter.events[2]}};
      if (std::find(r.begin(), r.end(), ac) != r.end()) failed.push_back("shared-component restriction");
      if (is_subword_conditioned(ApproxTimedWord{{nu.events[0], nu.events[2]}}, nu, TimeInterval::closed(0, 3)))
        failed.push_back("shared-component subword");
    }
  }
  if (!failed.empty()) notes.push_back("failed: " + cat(failed));
  return {failed.empty(), cat(notes)};
}

// --- 2 ---------------------------------------------------------------------

Outcome jtmin_at_ten() {
  auto property = make_property(testing::last_action_automaton());
  const auto s = testing::skewed_scenario(property->automaton.alphabet());
  std::vector<JTmin::Entry> at_ten;
  Ticks tmin1 = -1;
  RunOptions options;
  options.observer = [&](const Delivery& d, const Message&, const Monitor& m, const std::optional<TimelineRecord>&) {
    if (d.dst == 1 && d.local_time <= 10000) {
      at_ten = m.jtmin().entries();
      tmin1 = m.jtmin().tmin1();
    }
  };
  run(s, property, options);
  const std::vector<JTmin::Entry> want{{2, 5000}, {3, 5500}, {1, 10000}};
  std::ostringstream os;
  for (const auto& e : at_ten) os << "(" << e.monitor << "," << format_ticks(e.timestamp, 1000) << ")";
  os << " tmin1=" << format_ticks(tmin1, 1000);
  return {at_ten == want && tmin1 == 5000, os.str()};
}

// --- 3 ---------------------------------------------------------------------

Outcome cs_structure() {
  const auto ta = testing::last_action_automaton();
  const auto& al = ta.alphabet();
  const auto sigma = testing::m1_collected(al);
  const Ticks skew = 700;
  const Cs base = cs_next(ta, cs_add_events(initial_cs(ta), testing::atw_of(sigma, 0, 3, skew)), 4000);
  const auto rest = testing::atw_of(sigma, 3, 7, skew);
  const ApproxEvent b{al.at("b"), TimeInterval::closed(4300, 5700)};
  const ApproxEvent c{al.at("c"), TimeInterval::closed(4800, 6200)};
  const ApproxEvent a1{al.at("a"), TimeInterval::closed(6300, 7700)};
  const ApproxEvent a2{al.at("a"), TimeInterval::closed(9300, 10700)};
  const std::vector<ApproxTimedWord> remainders{
      {{b, c, a1, a2}}, {{c, a1, a2}}, {{b, a1, a2}}, {{a1, a2}}, {{a1, a2}}};
  const auto seen_b = *ta.find_location("seen_b"), seen_c = *ta.find_location("seen_c");

  std::size_t good = 0;
  std::vector<std::string> problems;
  if (base.empty()) problems.push_back("no base configurations");
  if (oracle::naive_decompose(rest, 4800).size() != 5) problems.push_back("oracle decomposition is not 5 pairs");
  for (const auto& entry : base) {
    if (!entry.remainder.empty()) problems.push_back("base entry with a remainder");
    const Cs next = cs_next(ta, cs_add_events(Cs{entry}, rest), 4800);
    std::vector<ApproxTimedWord> got;
    for (const auto& e : next) got.push_back(e.remainder);
    auto sorted_got = got, sorted_want = remainders;
    std::sort(sorted_got.begin(), sorted_got.end());
    std::sort(sorted_want.begin(), sorted_want.end());
    bool ok = next.size() == 5 && sorted_got == sorted_want;
    // the two b,c orders end in different locations
    std::set<LocationId> order_locations;
    for (const auto& e : next)
      if (e.remainder.size() == 2)
        for (const auto& [l, fed] : e.configs.zones())
          if (!fed.is_empty()) order_locations.insert(l);
    ok = ok && order_locations == std::set<LocationId>{seen_b, seen_c};
    if (ok) ++good;
  }
  problems.insert(problems.begin(), std::to_string(good) + "/" + std::to_string(base.size()) +
                                        " base configurations with the 5 shapes");
  return {!base.empty() && good == base.size() && problems.size() == 1, cat(problems)};
}

// --- 4 ---------------------------------------------------------------------

ApproxTimedWord scaled(const ApproxTimedWord& w, Ticks k) {
  ApproxTimedWord out;
  for (const auto& e : w.events)
    out.events.push_back({e.action, TimeInterval::closed(e.interval.lb() * k, *e.interval.ub() * k)});
  return out;
}

/// Random member of the unordered language; nullopt if sampling gave up.
std::optional<TimedWord> sample_member(Rng& rng, const ApproxTimedWord& w) {
  std::map<int, std::vector<std::size_t>> per;
  for (std::size_t k = 0; k < w.size(); ++k) per[w.events[k].action.component].push_back(k);
  for (int attempt = 0; attempt < 50; ++attempt) {
    auto left = per;
    TimedWord out;
    Ticks prev = 0;
    bool ok = true;
    while (ok && out.size() < w.size()) {
      std::vector<int> ready;
      for (auto& [c, idx] : left)
        if (!idx.empty()) ready.push_back(c);
      const int c = ready[static_cast<std::size_t>(uniform(rng, 0, static_cast<Ticks>(ready.size()) - 1))];
      const auto& e = w.events[left[c].front()];
      left[c].erase(left[c].begin());
      const Ticks lo = std::max(prev, e.interval.lb()), hi = *e.interval.ub();
      if (lo > hi) {
        ok = false;
        break;
      }
      prev = uniform(rng, lo, hi);
      out.events.push_back({e.action, prev});
    }
    if (ok) return out;
  }
  return std::nullopt;
}

/// Some w in the unordered language of `nu` has w|[0,T] == m.
bool extends(const ApproxTimedWord& nu, const TimedWord& m, Ticks T) {
  std::map<int, std::vector<std::size_t>> per;
  for (std::size_t k = 0; k < nu.size(); ++k) per[nu.events[k].action.component].push_back(k);
  std::map<int, std::vector<Event>> got;
  for (const auto& e : m.events) {
    if (e.date > T) return false;
    got[e.action.component].push_back(e);
  }
  for (const auto& [c, evs] : got)
    if (!per.count(c)) return false;
  for (const auto& [c, idx] : per) {
    const auto& mine = got[c];
    if (mine.size() > idx.size()) return false;
    Ticks prev = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& e = nu.events[idx[k]];
      if (k < mine.size()) {
        if (mine[k].action != e.action || !e.interval.contains(mine[k].date) || mine[k].date < prev) return false;
        prev = mine[k].date;
      } else {
        const Ticks d = std::max({prev, e.interval.lb(), T + 1});
        if (d > *e.interval.ub()) return false;
        prev = d;
      }
    }
  }
  return true;
}

Outcome restriction_sampling() {
  Rng rng(1001);
  std::size_t counterexamples = 0, sampled = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto al = testing::random_alphabet(rng, static_cast<int>(uniform(rng, 1, 3)));
    const Ticks skew = uniform(rng, 0, 3);
    const auto nu = scaled(testing::random_atw(rng, al, static_cast<int>(uniform(rng, 0, 5)), 20, skew), 2);
    const Ticks T = 2 * uniform(rng, 0, 24);
    const auto r = restrict(nu, T);
    for (int s = 0; s < 20; ++s) {
      const auto w = sample_member(rng, nu);
      if (!w) continue;
      const auto prefix = restrict(*w, TimeInterval::closed(0, T));
      ++sampled;
      if (std::none_of(r.begin(), r.end(), [&](const auto& v) { return oracle::naive_unordered_member(v, prefix); }))
        ++counterexamples;
    }
    for (const auto& v : r)
      for (int s = 0; s < 8; ++s) {
        const auto m = sample_member(rng, v);
        if (!m) continue;
        ++sampled;
        if (!extends(nu, *m, T)) ++counterexamples;
      }
  }
  return {counterexamples == 0, std::to_string(sampled) + " sampled words, " + std::to_string(counterexamples) +
                                    " counterexamples"};
}

// --- 5 ---------------------------------------------------------------------

Outcome state_vs_oracle() {
  Rng rng(5005);
  std::size_t mismatches = 0, points = 0;
  for (int k = 0; k < 500; ++k) {
    const auto al = testing::random_alphabet(rng, static_cast<int>(uniform(rng, 1, 3)));
    const auto ta = testing::random_automaton(rng, al, 4, 2, 3, 1);
    const Ticks skew = uniform(rng, 0, 2);
    const auto w = testing::random_atw(rng, al, static_cast<int>(uniform(rng, 0, 6)), 8, skew);
    const Ticks T = uniform(rng, 0, 10);
    const auto state = cs_state(ta, cs_next(ta, cs_add_events(initial_cs(ta), w), T), T);
    const auto den = oracle::grid_denominator(ta.clock_count());
    oracle::ExactState exact(ta, den);
    exact.add_restricted(w, T);
    for (auto p : oracle::grid_points(ta.clock_count(), T, den))
      for (LocationId l = 0; l < ta.location_count(); ++l) {
        const bool want = exact.contains(l, p);
        p.push_back(T * den);
        ++points;
        if (state.contains_scaled(l, p, den) != want) ++mismatches;
        p.pop_back();
      }
  }
  return {mismatches == 0, std::to_string(points) + " grid points, " + std::to_string(mismatches) + " mismatches"};
}

// --- 6 ---------------------------------------------------------------------

std::map<ApproxTimedWord, ConfigSet> by_remainder(const TimedAutomaton& ta, const Cs& cs) {
  std::map<ApproxTimedWord, ConfigSet> out;
  for (const auto& e : cs) {
    auto [it, fresh] = out.try_emplace(e.remainder, ConfigSet(ta.clock_count() + 2, ta.clock_count() + 1));
    it->second.unite(e.configs);
  }
  return out;
}

Outcome incremental_update() {
  Rng rng(6006);
  std::size_t mismatches = 0, exact_sets = 0;
  MonotonicityLog& log = monotonicity;
  for (int k = 0; k < 500; ++k) {
    const int comps = static_cast<int>(uniform(rng, 1, 3));
    const auto al = testing::random_alphabet(rng, comps);
    auto property = make_property(testing::random_automaton(rng, al, 4, 2, 3, 1));
    const auto& ta = property->automaton;
    const Ticks skew = uniform(rng, 0, 2);
    const int batches = static_cast<int>(uniform(rng, 2, 4));
    std::vector<ApproxTimedWord> words;
    std::vector<Ticks> cuts;
    std::vector<Ticks> last(static_cast<std::size_t>(comps) + 1, -1);
    Ticks frontier = 0;
    for (int b = 0; b < batches; ++b) {
      const Ticks start = (b == 0 ? 0 : frontier + skew + 1);
      std::vector<TimedWord> per(last.size());
      Ticks latest = start;
      for (auto e = uniform(rng, 0, 2); e > 0; --e) {
        const auto& act = al.actions()[static_cast<std::size_t>(uniform(rng, 0, static_cast<Ticks>(al.actions().size()) - 1))];
        auto& t = last[static_cast<std::size_t>(act.component)];
        t = std::max(t + 1, start) + uniform(rng, 0, 2);
        per[static_cast<std::size_t>(act.component)].events.push_back({act, t});
        latest = std::max(latest, t);
      }
      ApproxTimedWord w;
      for (const auto& p : per) w = tensor(w, approximate(p, skew));
      words.push_back(w);
      frontier = uniform(rng, frontier, latest + skew);
      cuts.push_back(frontier);
    }
    Cs incremental = initial_cs(ta);
    ApproxTimedWord all;
    Flags folded = classify(cs_state(ta, incremental, 0), property->sets);
    std::vector<Flags> flag_seq{folded};
    for (int b = 0; b < batches; ++b) {
      incremental = cs_next(ta, cs_add_events(incremental, words[static_cast<std::size_t>(b)]), cuts[static_cast<std::size_t>(b)]);
      all = tensor(all, words[static_cast<std::size_t>(b)]);
      const Flags now = classify(cs_state(ta, incremental, cuts[static_cast<std::size_t>(b)]), property->sets);
      folded = {folded.inev || now.inev, folded.never || now.never, folded.other && now.other};
      flag_seq.push_back(folded);
    }
    log.check_flags(flag_seq);
    const Cs one_shot = cs_next(ta, cs_add_events(initial_cs(ta), all), cuts.back());
    const auto lhs = by_remainder(ta, incremental), rhs = by_remainder(ta, one_shot);
    bool same = lhs.size() == rhs.size();
    for (auto it = lhs.begin(), jt = rhs.begin(); same && it != lhs.end(); ++it, ++jt)
      same = it->first == jt->first && it->second.equals(jt->second);
    if (!same) ++mismatches;
    if (incremental.size() == one_shot.size()) ++exact_sets;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches, " + std::to_string(exact_sets) +
                               "/500 with equal entry counts"};
}

// --- 8, 9, 11 --------------------------------------------------------------

struct RandomRun {
  Scenario scenario;
  std::shared_ptr<const Property> property;
  Simulated result;
};

std::vector<RandomRun>& random_runs() {
  static std::vector<RandomRun> runs;
  if (!runs.empty()) return runs;
  Rng rng(8008);
  for (int k = 0; k < 200; ++k) {
    const auto al = testing::random_alphabet(rng, 3);
    auto property = make_property(testing::random_automaton(rng, al, 3, 2, 3, 1));
    auto s = testing::random_scenario(rng, al, 1, uniform(rng, 1, 3), 2, 1, 4);
    s.heartbeat = 1;
    runs.push_back({s, property, simulate(s, property)});
  }
  return runs;
}

Outcome compatibility() {
  std::size_t updates = 0, violations = 0, empty_states = 0;
  for (const auto& r : random_runs()) {
    const auto& global = r.result.trace.global_trace;
    for (std::size_t m = 1; m < r.result.seen.updates.size(); ++m)
      for (std::size_t u = 0; u < r.result.seen.updates[m].size(); ++u) {
        const auto& [word, T] = r.result.seen.updates[m][u];
        ++updates;
        if (!r.result.seen.state_nonempty[m][u]) ++empty_states;
        const auto prefix = restrict(global, TimeInterval::closed(0, T));
        const auto options = oracle::naive_restrict(word, T);
        if (std::none_of(options.begin(), options.end(),
                         [&](const auto& v) { return oracle::naive_unordered_member(v, prefix); }))
          ++violations;
      }
  }
  return {violations == 0 && empty_states == 0 && updates > 0,
          std::to_string(updates) + " update points, " + std::to_string(violations) + " non-members, " +
              std::to_string(empty_states) + " empty states"};
}

Outcome soundness() {
  std::map<Verdict, std::size_t> confirmed;
  std::size_t violations = 0;
  for (auto& r : random_runs()) {
    const auto& ta = r.property->automaton;
    oracle::RegionOracle regions(ta);
    const auto exact = approximate(r.result.trace.global_trace, 0);
    for (std::size_t m = 1; m < r.result.seen.updates.size(); ++m) {
      const auto& verdicts = r.result.seen.verdicts[m];
      if (verdicts.empty() || !is_definitive(verdicts.back())) continue;
      const auto& updates = r.result.seen.updates[m];
      const Verdict v = verdicts.back();
      Verdict want = Verdict::Pending;
      if (v == Verdict::Inconc)
        want = oracle::naive_verdict(ta, regions, updates);
      else
        want = oracle::naive_verdict(ta, regions, {{exact, updates.back().second}});
      if (want == v)
        ++confirmed[v];
      else
        ++violations;
    }
  }
  std::vector<std::string> notes;
  for (const auto& [v, n] : confirmed) notes.push_back(std::to_string(n) + " " + to_string(v));
  notes.push_back(std::to_string(violations) + " violations");
  return {violations == 0, cat(notes)};
}

// --- 10 --------------------------------------------------------------------

TimedAutomaton deadline_automaton(Ticks deadline) {
  const nlohmann::json guard_in = {{{"lhs", "x"}, {"op", "<="}, {"const", deadline}}};
  const nlohmann::json guard_out = {{{"lhs", "x"}, {"op", ">"}, {"const", deadline}}};
  nlohmann::json t = nlohmann::json::array();
  t.push_back({{"from", "wait"}, {"to", "done"}, {"action", "a"}, {"guard", guard_in}});
  t.push_back({{"from", "wait"}, {"to", "late"}, {"action", "a"}, {"guard", guard_out}});
  t.push_back({{"from", "wait"}, {"to", "late"}, {"action", "b"}});
  t.push_back({{"from", "wait"}, {"to", "wait"}, {"action", "c"}});
  for (const char* l : {"done", "late"})
    for (const char* a : {"a", "b", "c"}) t.push_back({{"from", l}, {"to", l}, {"action", a}});
  return load_automaton({{"resolution", 1000},
                         {"clocks", {"x"}},
                         {"components",
                          {{{"name", "C1"}, {"actions", {"a"}}},
                           {{"name", "C2"}, {"actions", {"b"}}},
                           {{"name", "C3"}, {"actions", {"c"}}}}},
                         {"locations", {"wait", "done", "late"}},
                         {"initial", "wait"},
                         {"final", {"done"}},
                         {"transitions", t}});
}

std::vector<RandomRun> scripted_runs;

Outcome completeness() {
  Rng rng(1010);
  std::size_t hits = 0;
  std::vector<std::string> misses;
  for (int k = 0; k < 50; ++k) {
    const Ticks deadline = uniform(rng, 5, 9);
    auto property = make_property(deadline_automaton(deadline));
    const auto& al = property->automaton.alphabet();
    const Ticks D = deadline * 1000, skew = 100 * uniform(rng, 2, 10);
    const int variant = k % 3;  // good, late a, early b
    Scenario s;
    s.resolution = 1000;
    s.skew = skew;
    s.seed = rng();
    s.delay.kind = DelayModel::Kind::Uniform;
    s.delay.max = skew;
    s.components.resize(3);
    Ticks last = 0;
    auto place = [&](int comp, const char* action, Ticks date) {
      s.components[static_cast<std::size_t>(comp - 1)].events.push_back({al.at(action), date});
      last = std::max(last, date);
    };
    if (variant == 0) place(1, "a", uniform(rng, 500, D - 2 * skew));
    if (variant == 1) place(1, "a", uniform(rng, D + 2 * skew + 1, D + 3000));
    if (variant == 2) place(2, "b", uniform(rng, 500, D + 2000));
    for (Ticks t = uniform(rng, 100, 900); t < D + 3000; t += uniform(rng, 300, 1500)) place(3, "c", t);
    for (auto& c : s.components) c.offsets.push_back({0, uniform(rng, -skew / 2, skew / 2)});
    s.horizon = std::max(last, D) + 6 * skew + 1000;
    const auto sim = simulate(s, property);
    const Verdict want = variant == 0 ? Verdict::True : Verdict::False;
    bool ok = true;
    for (const auto& m : sim.trace.summary)
      ok = ok && m.verdict == want && m.definitive_at && *m.definitive_at <= *s.horizon;
    if (ok)
      ++hits;
    else
      misses.push_back("#" + std::to_string(k));
    scripted_runs.push_back({s, property, sim});
  }
  std::string detail = std::to_string(hits) + "/50 definitive before the horizon";
  if (!misses.empty()) detail += "; missed " + cat(misses);
  return {hits == 50, detail};
}

// --- 7, 11 -----------------------------------------------------------------

Outcome monotone() {
  return {monotonicity.violations == 0 && monotonicity.sequences > 0,
          std::to_string(monotonicity.sequences) + " sequences, " + std::to_string(monotonicity.violations) +
              " violations"};
}

Outcome determinism() {
  std::size_t compared = 0, differing = 0;
  auto compare = [&](const std::vector<RandomRun>& runs) {
    for (const auto& r : runs) {
      const auto again = run(r.scenario, r.property);
      RunOptions threaded;
      threaded.threads = 3;
      const auto parallel = run(r.scenario, r.property, threaded);
      const auto bytes = timeline_bytes(r.result.trace);
      compared += 2;
      if (timeline_bytes(again) != bytes) ++differing;
      if (timeline_bytes(parallel) != bytes) ++differing;
    }
  };
  compare(random_runs());
  compare(scripted_runs);
  return {differing == 0, std::to_string(compared) + " reruns, " + std::to_string(differing) + " differing"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> check;
  };
  // 7 and 11 read the runs made by the others, so they are evaluated last.
  const std::vector<Criterion> order{
      {1, "example restriction", 1, example_restriction},
      {2, "jtmin at local 10", 1, jtmin_at_ten},
      {3, "cs structure", 5, cs_structure},
      {4, "restriction sampling", 120, restriction_sampling},
      {5, "state vs oracle", 300, state_vs_oracle},
      {6, "incremental update", 300, incremental_update},
      {8, "true trace compatible", 600, compatibility},
      {9, "soundness", 600, soundness},
      {10, "completeness", 600, completeness},
      {7, "monotone verdicts and flags", 600, monotone},
      {11, "determinism", 600, determinism},
  };
  std::map<int, std::string> lines;
  bool all = true;
  for (const auto& c : order) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the time limit";
    }
    all = all && o.pass;
    char head[128];
    std::snprintf(head, sizeof head, "%s %2d %-28s %8.2fs  ", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
    lines[c.id] = head + o.detail;
  }
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  return all ? 0 : 1;
}
