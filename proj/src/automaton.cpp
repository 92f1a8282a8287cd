#include "dtmon/automaton.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "dtmon/error.hpp"

namespace dtmon {

namespace {

void apply_constraint(Dbm& z, const ClockConstraint& c) {
  const std::size_t i = c.lhs;
  const std::size_t j = c.rhs.value_or(0);
  switch (c.op) {
    case CmpOp::Lt: z.constrain(i, j, Bound::lt(c.constant)); break;
    case CmpOp::Le: z.constrain(i, j, Bound::le(c.constant)); break;
    case CmpOp::Eq:
      z.constrain(i, j, Bound::le(c.constant));
      z.constrain(j, i, Bound::le(-c.constant));
      break;
    case CmpOp::Ge: z.constrain(j, i, Bound::le(-c.constant)); break;
    case CmpOp::Gt: z.constrain(j, i, Bound::lt(-c.constant)); break;
  }
}

std::string op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

// Clock-only DBM embedded into the full dimension with abs unconstrained.
Dbm lift_abs(const Dbm& clocks_only, std::size_t dim, std::size_t abs) {
  Dbm out(dim, abs);
  for (std::size_t i = 0; i < clocks_only.dim(); ++i)
    for (std::size_t j = 0; j < clocks_only.dim(); ++j)
      if (i != j) out.constrain(i, j, clocks_only.at(i, j));
  return out;
}

Federation lift_abs(const Federation& f, std::size_t dim, std::size_t abs) {
  Federation out(dim, abs);
  for (const auto& z : f.zones()) out.add(lift_abs(z, dim, abs));
  return out;
}

std::string describe_guard(const TimedAutomaton& ta, const Transition& t) {
  if (t.guard.empty()) return "true";
  std::string s;
  for (const auto& c : t.guard) {
    if (!s.empty()) s += " && ";
    s += ta.clocks()[c.lhs - 1];
    if (c.rhs) s += "-" + ta.clocks()[*c.rhs - 1];
    s += op_symbol(c.op) + std::to_string(c.constant);
  }
  return s;
}

std::vector<std::string> clock_names_only(const TimedAutomaton& ta) {
  std::vector<std::string> names{"0"};
  names.insert(names.end(), ta.clocks().begin(), ta.clocks().end());
  return names;
}

}  // namespace

// --- TimedAutomaton -------------------------------------------------------------

TimedAutomaton::TimedAutomaton(Ticks resolution, std::vector<std::string> clocks, Alphabet alphabet,
                               std::vector<std::string> locations, LocationId initial, std::vector<bool> final,
                               std::vector<Transition> transitions, PropertyMode mode)
    : resolution_(resolution),
      clocks_(std::move(clocks)),
      alphabet_(std::move(alphabet)),
      locations_(std::move(locations)),
      initial_(initial),
      final_(std::move(final)),
      transitions_(std::move(transitions)),
      mode_(mode) {
  if (resolution_ <= 0) throw ValidationError("resolution must be positive");
  if (locations_.empty()) throw ValidationError("automaton has no locations");
  if (initial_ >= locations_.size()) throw ValidationError("initial location out of range");
  if (final_.size() != locations_.size()) throw ValidationError("final set size mismatch");
  const std::size_t n_actions = alphabet_.actions().size();
  outgoing_.assign(locations_.size(), std::vector<std::vector<std::size_t>>(n_actions));
  for (std::size_t k = 0; k < transitions_.size(); ++k) {
    const auto& t = transitions_[k];
    if (t.from >= locations_.size() || t.to >= locations_.size())
      throw ValidationError("transition location out of range");
    if (t.action >= n_actions) throw ValidationError("transition action out of range");
    for (const auto& c : t.guard)
      if (c.lhs == 0 || c.lhs > clocks_.size() || (c.rhs && (*c.rhs == 0 || *c.rhs > clocks_.size())))
        throw ValidationError("guard clock out of range");
    for (std::size_t r : t.reset)
      if (r == 0 || r > clocks_.size()) throw ValidationError("reset clock out of range");
    outgoing_[t.from][t.action].push_back(k);
  }
}

const std::vector<std::size_t>& TimedAutomaton::outgoing(LocationId from, std::size_t action) const {
  return outgoing_.at(from).at(action);
}

bool TimedAutomaton::final_absorbing() const {
  return std::all_of(transitions_.begin(), transitions_.end(),
                     [&](const Transition& t) { return !final_[t.from] || final_[t.to]; });
}

std::optional<LocationId> TimedAutomaton::find_location(const std::string& name) const {
  auto it = std::find(locations_.begin(), locations_.end(), name);
  if (it == locations_.end()) return std::nullopt;
  return static_cast<LocationId>(it - locations_.begin());
}

Dbm TimedAutomaton::guard_zone(const Transition& t) const {
  Dbm z(dim(), abs_index());
  for (const auto& c : t.guard) apply_constraint(z, c);
  return z;
}

Dbm TimedAutomaton::guard_zone_clocks(const Transition& t) const {
  Dbm z(clock_count() + 1);
  for (const auto& c : t.guard) apply_constraint(z, c);
  return z;
}

std::vector<Ticks> TimedAutomaton::max_constants() const {
  std::vector<Ticks> m(clock_count() + 1, 0);
  for (const auto& t : transitions_)
    for (const auto& c : t.guard) {
      const Ticks v = c.constant < 0 ? -c.constant : c.constant;
      m[c.lhs] = std::max(m[c.lhs], v);
      if (c.rhs) m[*c.rhs] = std::max(m[*c.rhs], v);
    }
  return m;
}

std::vector<std::string> TimedAutomaton::dbm_names() const {
  auto names = clock_names_only(*this);
  names.push_back("abs");
  return names;
}

// --- validation -----------------------------------------------------------------

void check_deterministic(const TimedAutomaton& ta) {
  for (LocationId l = 0; l < ta.location_count(); ++l)
    for (std::size_t a = 0; a < ta.alphabet().actions().size(); ++a) {
      const auto& out = ta.outgoing(l, a);
      for (std::size_t p = 0; p < out.size(); ++p)
        for (std::size_t q = p + 1; q < out.size(); ++q) {
          const auto& t1 = ta.transitions()[out[p]];
          const auto& t2 = ta.transitions()[out[q]];
          const Dbm g1 = ta.guard_zone_clocks(t1);
          const Dbm g2 = ta.guard_zone_clocks(t2);
          if (!g1.intersects(g2)) continue;
          std::set<std::size_t> r1(t1.reset.begin(), t1.reset.end());
          std::set<std::size_t> r2(t2.reset.begin(), t2.reset.end());
          if (g1 == g2 && r1 == r2 && t1.to == t2.to) continue;
          throw ValidationError("nondeterminism at location '" + ta.locations()[l] + "' on action '" +
                                ta.alphabet().actions()[a].name + "': guards " + describe_guard(ta, t1) +
                                " and " + describe_guard(ta, t2) + " overlap");
        }
    }
}

std::vector<CompletenessGap> completeness_gaps(const TimedAutomaton& ta, std::size_t max_states) {
  const std::size_t cdim = ta.clock_count() + 1;
  const auto maxc = ta.max_constants();
  const std::size_t n_actions = ta.alphabet().actions().size();
  std::vector<Federation> passed(ta.location_count(), Federation(cdim));
  std::map<std::pair<LocationId, std::size_t>, Federation> gaps;
  std::deque<std::pair<LocationId, Dbm>> work;

  Dbm init = Dbm::zero(cdim);
  init.up().extrapolate_max(maxc);
  passed[ta.initial()].add(init);
  work.emplace_back(ta.initial(), init);
  std::size_t explored = 0;
  while (!work.empty()) {
    auto [l, z] = work.front();
    work.pop_front();
    if (++explored > max_states) throw ResourceLimit("reachability exceeded " + std::to_string(max_states) + " zones");
    for (std::size_t a = 0; a < n_actions; ++a) {
      Federation covered(cdim);
      for (std::size_t k : ta.outgoing(l, a)) covered.add(ta.guard_zone_clocks(ta.transitions()[k]));
      Federation missing = Federation(z).difference(covered);
      if (!missing.is_empty()) {
        auto [it, fresh] = gaps.try_emplace({l, a}, Federation(cdim));
        it->second.unite(missing);
      }
      for (std::size_t k : ta.outgoing(l, a)) {
        const auto& t = ta.transitions()[k];
        Dbm next = z;
        next.intersect(ta.guard_zone_clocks(t));
        if (next.is_empty()) continue;
        for (std::size_t r : t.reset) next.reset(r);
        next.up().extrapolate_max(maxc);
        if (passed[t.to].includes(Federation(next))) continue;
        passed[t.to].add(next);
        work.emplace_back(t.to, next);
      }
    }
  }
  std::vector<CompletenessGap> out;
  for (auto& [key, fed] : gaps) out.push_back({key.first, key.second, fed});
  return out;
}

namespace {

std::vector<ClockConstraint> zone_to_guard(const Dbm& z) {
  std::vector<ClockConstraint> g;
  for (std::size_t i = 0; i < z.dim(); ++i)
    for (std::size_t j = 0; j < z.dim(); ++j) {
      if (i == j) continue;
      const Bound b = z.at(i, j);
      if (b.is_infinite()) continue;
      if (i == 0 && j != 0) {
        if (b == Bound::zero()) continue;
        g.push_back({j, std::nullopt, b.strict() ? CmpOp::Gt : CmpOp::Ge, -b.value()});
      } else if (j == 0) {
        g.push_back({i, std::nullopt, b.strict() ? CmpOp::Lt : CmpOp::Le, b.value()});
      } else {
        g.push_back({i, j, b.strict() ? CmpOp::Lt : CmpOp::Le, b.value()});
      }
    }
  return g;
}

}  // namespace

TimedAutomaton complete_with_sink(const TimedAutomaton& ta, std::size_t max_states) {
  const auto gaps = completeness_gaps(ta, max_states);
  if (gaps.empty()) return ta;
  auto locations = ta.locations();
  auto final = ta.final_set();
  auto transitions = ta.transitions();
  std::string sink_name = "__sink";
  while (ta.find_location(sink_name)) sink_name += "_";
  const LocationId sink = locations.size();
  locations.push_back(sink_name);
  final.push_back(false);
  const std::size_t cdim = ta.clock_count() + 1;
  for (const auto& gap : gaps) {
    Federation covered(cdim);
    for (std::size_t k : ta.outgoing(gap.location, gap.action)) covered.add(ta.guard_zone_clocks(ta.transitions()[k]));
    const Federation missing = Federation(Dbm::universe(cdim)).difference(covered);
    for (const auto& piece : missing.zones())
      transitions.push_back({gap.location, sink, gap.action, zone_to_guard(piece), {}});
  }
  for (std::size_t a = 0; a < ta.alphabet().actions().size(); ++a) transitions.push_back({sink, sink, a, {}, {}});
  return TimedAutomaton(ta.resolution(), ta.clocks(), ta.alphabet(), std::move(locations), ta.initial(),
                        std::move(final), std::move(transitions), ta.mode());
}

TimedAutomaton seen_product(const TimedAutomaton& ta) {
  const std::size_t n = ta.location_count();
  std::vector<std::string> locations;
  for (const auto& l : ta.locations()) locations.push_back(l);
  for (const auto& l : ta.locations()) locations.push_back(l + "*");
  std::vector<bool> final(2 * n, false);
  for (std::size_t l = 0; l < n; ++l) final[n + l] = true;
  auto copy = [&](LocationId l, bool seen) { return seen ? n + l : l; };
  std::vector<Transition> transitions;
  for (const auto& t : ta.transitions())
    for (bool seen : {false, true}) {
      Transition p = t;
      p.from = copy(t.from, seen);
      p.to = copy(t.to, seen || ta.is_final(t.to));
      transitions.push_back(std::move(p));
    }
  const LocationId init = copy(ta.initial(), ta.is_final(ta.initial()));
  return TimedAutomaton(ta.resolution(), ta.clocks(), ta.alphabet(), std::move(locations), init, std::move(final),
                        std::move(transitions), PropertyMode::NeverOnly);
}

// --- loading --------------------------------------------------------------------

namespace {

CmpOp parse_op(const std::string& s) {
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == "=" || s == "==") return CmpOp::Eq;
  if (s == ">=") return CmpOp::Ge;
  if (s == ">") return CmpOp::Gt;
  throw ValidationError("unknown comparison operator '" + s + "'");
}

template <class T>
T required(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("automaton document lacks field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

TimedAutomaton load_automaton(const nlohmann::json& doc, const LoadOptions& options,
                              std::vector<std::string>* warnings) {
  if (!doc.is_object()) throw ValidationError("automaton document must be a JSON object");
  const Ticks resolution = doc.value("resolution", kDefaultResolution);
  const auto clocks = required<std::vector<std::string>>(doc, "clocks");
  std::map<std::string, std::size_t> clock_index;
  for (std::size_t k = 0; k < clocks.size(); ++k)
    if (!clock_index.emplace(clocks[k], k + 1).second) throw ValidationError("duplicate clock '" + clocks[k] + "'");

  Alphabet alphabet;
  if (!doc.contains("components")) throw ValidationError("automaton document lacks field 'components'");
  const auto& comps = doc.at("components");
  int comp_id = 0;
  auto add_component = [&](const nlohmann::json& actions) {
    ++comp_id;
    for (const auto& a : actions) alphabet.add(a.get<std::string>(), comp_id);
  };
  if (comps.is_object()) {
    for (const auto& [name, actions] : comps.items()) add_component(actions);
  } else if (comps.is_array()) {
    for (const auto& c : comps) add_component(c.at("actions"));
  } else {
    throw ValidationError("'components' must be an object or an array");
  }
  alphabet.set_components(comp_id);

  const auto locations = required<std::vector<std::string>>(doc, "locations");
  std::map<std::string, LocationId> loc_index;
  for (std::size_t k = 0; k < locations.size(); ++k)
    if (!loc_index.emplace(locations[k], k).second) throw ValidationError("duplicate location '" + locations[k] + "'");
  auto loc = [&](const std::string& name) {
    auto it = loc_index.find(name);
    if (it == loc_index.end()) throw ValidationError("unknown location '" + name + "'");
    return it->second;
  };
  auto clock = [&](const std::string& name) {
    auto it = clock_index.find(name);
    if (it == clock_index.end()) throw ValidationError("unknown clock '" + name + "'");
    return it->second;
  };

  const LocationId initial = loc(required<std::string>(doc, "initial"));
  std::vector<bool> final(locations.size(), false);
  for (const auto& f : required<std::vector<std::string>>(doc, "final")) final[loc(f)] = true;

  std::vector<Transition> transitions;
  if (!doc.contains("transitions")) throw ValidationError("automaton document lacks field 'transitions'");
  for (const auto& tj : doc.at("transitions")) {
    Transition t;
    t.from = loc(required<std::string>(tj, "from"));
    t.to = loc(required<std::string>(tj, "to"));
    t.action = alphabet.index_of(required<std::string>(tj, "action"));
    for (const auto& gj : tj.value("guard", nlohmann::json::array())) {
      ClockConstraint c;
      c.lhs = clock(required<std::string>(gj, "lhs"));
      if (gj.contains("rhs") && !gj.at("rhs").is_null()) c.rhs = clock(gj.at("rhs").get<std::string>());
      c.op = parse_op(required<std::string>(gj, "op"));
      const auto k = required<std::int64_t>(gj, "const");
      if (k < 0) throw ValidationError("guard constants must be natural numbers");
      c.constant = k * resolution;
      t.guard.push_back(c);
    }
    for (const auto& r : tj.value("reset", std::vector<std::string>{})) t.reset.push_back(clock(r));
    transitions.push_back(std::move(t));
  }

  TimedAutomaton ta(resolution, clocks, alphabet, locations, initial, final, transitions);
  check_deterministic(ta);
  const auto gaps = completeness_gaps(ta, options.max_symbolic_states);
  if (!gaps.empty()) {
    const auto& g = gaps.front();
    const std::string witness = "location '" + ta.locations()[g.location] + "', action '" +
                                ta.alphabet().actions()[g.action].name +
                                "', uncovered valuations " + g.missing.to_string(clock_names_only(ta));
    if (!options.auto_complete) throw ValidationError("incomplete automaton: " + witness);
    if (warnings) warnings->push_back("auto-completed guard gaps to a sink; first gap at " + witness);
    ta = complete_with_sink(ta, options.max_symbolic_states);
  }
  if (!ta.final_absorbing()) {
    if (!options.allow_non_absorbing)
      throw UnsupportedMode("final locations are not absorbing; general (co-Büchi) Inev is not supported");
    if (warnings) warnings->push_back("final set not absorbing: monitoring bad prefixes only (seen-F product)");
    ta = seen_product(ta);
  }
  return ta;
}

TimedAutomaton load_automaton_file(const std::string& path, const LoadOptions& options,
                                   std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open automaton file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("automaton file '" + path + "': " + e.what());
  }
  return load_automaton(doc, options, warnings);
}

// --- ConfigSet ------------------------------------------------------------------

ConfigSet ConfigSet::initial(const TimedAutomaton& ta) {
  ConfigSet s(ta.dim(), ta.abs_index());
  s.add(ta.initial(), Dbm::zero(ta.dim(), ta.abs_index()));
  return s;
}

ConfigSet ConfigSet::universe(const TimedAutomaton& ta) {
  ConfigSet s(ta.dim(), ta.abs_index());
  for (LocationId l = 0; l < ta.location_count(); ++l) s.add(l, Dbm::universe(ta.dim(), ta.abs_index()));
  return s;
}

const Federation* ConfigSet::find(LocationId l) const {
  auto it = zones_.find(l);
  return it == zones_.end() ? nullptr : &it->second;
}

void ConfigSet::add(LocationId l, const Dbm& zone) {
  if (zone.is_empty()) return;
  auto [it, fresh] = zones_.try_emplace(l, Federation(dim_, abs_));
  it->second.add(zone);
}

void ConfigSet::add(LocationId l, const Federation& fed) {
  if (fed.is_empty()) return;
  auto [it, fresh] = zones_.try_emplace(l, Federation(dim_, abs_));
  it->second.unite(fed);
}

ConfigSet& ConfigSet::unite(const ConfigSet& other) {
  for (const auto& [l, f] : other.zones_) add(l, f);
  return *this;
}

ConfigSet& ConfigSet::up() {
  for (auto& [l, f] : zones_) f.up();
  return *this;
}

ConfigSet& ConfigSet::fix_abs(Ticks date) {
  for (auto& [l, f] : zones_) f.fix(abs_, date);
  std::erase_if(zones_, [](const auto& kv) { return kv.second.is_empty(); });
  return *this;
}

ConfigSet ConfigSet::intersection(const ConfigSet& other) const {
  ConfigSet out(dim_, abs_);
  for (const auto& [l, f] : zones_)
    if (const Federation* g = other.find(l)) out.add(l, f.intersection(*g));
  return out;
}

ConfigSet ConfigSet::difference(const ConfigSet& other) const {
  ConfigSet out(dim_, abs_);
  for (const auto& [l, f] : zones_) {
    const Federation* g = other.find(l);
    out.add(l, g ? f.difference(*g) : f);
  }
  return out;
}

bool ConfigSet::intersects(const ConfigSet& other) const {
  for (const auto& [l, f] : zones_)
    if (const Federation* g = other.find(l); g && f.intersects(*g)) return true;
  return false;
}

bool ConfigSet::includes(const ConfigSet& other) const {
  for (const auto& [l, f] : other.zones_) {
    const Federation* mine = find(l);
    if (!mine || !mine->includes(f)) return false;
  }
  return true;
}

bool ConfigSet::contains_scaled(LocationId l, std::span<const std::int64_t> point, std::int64_t den) const {
  const Federation* f = find(l);
  return f && f->contains_scaled(point, den);
}

std::string ConfigSet::to_string(const TimedAutomaton& ta) const {
  if (zones_.empty()) return "{}";
  std::string out;
  for (const auto& [l, f] : zones_) {
    if (!out.empty()) out += "; ";
    out += ta.locations()[l] + ": " + f.to_string(ta.dbm_names());
  }
  return out;
}

// --- successor operators ------------------------------------------------------------

ConfigSet after_event(const TimedAutomaton& ta, const ConfigSet& set, const Action& action,
                      const TimeInterval& interval) {
  ConfigSet out(ta.dim(), ta.abs_index());
  if (interval.is_empty()) return out;
  const std::size_t a = ta.alphabet().index_of(action.name);
  const std::size_t abs = ta.abs_index();
  for (const auto& [l, fed] : set.zones()) {
    const auto& outgoing = ta.outgoing(l, a);
    if (outgoing.empty()) continue;
    Federation dated = fed;
    dated.up();
    dated.constrain(0, abs, Bound::make(-interval.lb(), interval.lower_strict()));
    if (!interval.upper_infinite()) dated.constrain(abs, 0, Bound::make(*interval.ub(), interval.upper_strict()));
    if (dated.is_empty()) continue;
    for (std::size_t k : outgoing) {
      const auto& t = ta.transitions()[k];
      Federation fired = dated.intersection(ta.guard_zone(t));
      for (std::size_t r : t.reset) fired.reset(r);
      out.add(t.to, fired);
    }
  }
  return out;
}

ConfigSet after_ordered_noclose(const TimedAutomaton& ta, const ConfigSet& set, const ApproxTimedWord& word) {
  ConfigSet cur = set;
  for (const auto& e : word.events) {
    if (cur.is_empty()) break;
    cur = after_event(ta, cur, e.action, e.interval);
  }
  return cur;
}

ConfigSet after_ordered(const TimedAutomaton& ta, const ConfigSet& set, const ApproxTimedWord& word) {
  ConfigSet cur = after_ordered_noclose(ta, set, word);
  cur.up();
  return cur;
}

ConfigSet after_word(const TimedAutomaton& ta, const ConfigSet& set, const TimedWord& word, Ticks start,
                     Ticks end) {
  validate(word);
  if (!word.empty() && word.firstt() < start) throw OrderingError("after_word: first event precedes start date");
  if (word.lastt() > end || start > end) throw OrderingError("after_word: end date precedes the last event");
  ConfigSet cur = set;
  cur.fix_abs(start);
  for (const auto& e : word.events) cur = after_event(ta, cur, e.action, TimeInterval::singleton(e.date));
  cur.up();
  cur.fix_abs(end);
  return cur;
}

// --- Inev / Never -------------------------------------------------------------------

namespace {

// Valuations before firing `t` (and the delay preceding it) that lead into `target`.
Federation pre_transition(const TimedAutomaton& ta, const Transition& t, const Federation& target) {
  Federation f = target;
  for (std::size_t r : t.reset) f.constrain(r, 0, Bound::le(0));
  for (std::size_t r : t.reset) f.free(r);
  f = f.intersection(ta.guard_zone_clocks(t));
  Federation out(f.dim());
  for (auto z : f.zones()) out.add(z.down());
  return out;
}

void count_work(std::size_t& work, std::size_t add, std::size_t cap) {
  work += add;
  if (work > cap) throw ResourceLimit("symbolic fixpoint exceeded " + std::to_string(cap) + " zone operations");
}

}  // namespace

ConfigSet compute_never(const TimedAutomaton& ta, std::size_t max_iterations) {
  const std::size_t cdim = ta.clock_count() + 1;
  const Dbm all = Dbm::universe(cdim);
  std::vector<Federation> coreach(ta.location_count(), Federation(cdim));
  for (LocationId l = 0; l < ta.location_count(); ++l)
    if (ta.is_final(l)) coreach[l].add(all);
  std::size_t work = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& t : ta.transitions()) {
      if (ta.is_final(t.from) || coreach[t.to].is_empty()) continue;
      Federation pre = pre_transition(ta, t, coreach[t.to]);
      count_work(work, pre.size() + 1, max_iterations);
      if (coreach[t.from].includes(pre)) continue;
      coreach[t.from].unite(pre);
      changed = true;
    }
  }
  ConfigSet never(ta.dim(), ta.abs_index());
  for (LocationId l = 0; l < ta.location_count(); ++l) {
    if (ta.is_final(l)) continue;
    never.add(l, lift_abs(Federation(all).difference(coreach[l]), ta.dim(), ta.abs_index()));
  }
  return never;
}

ConfigSet compute_inev(const TimedAutomaton& ta, std::size_t max_iterations) {
  if (ta.mode() != PropertyMode::Absorbing || !ta.final_absorbing())
    throw UnsupportedMode("Inev requires an absorbing final set");
  const std::size_t cdim = ta.clock_count() + 1;
  const Dbm all = Dbm::universe(cdim);
  // Greatest fixpoint: configurations with an infinite run avoiding F.
  std::vector<Federation> avoid(ta.location_count(), Federation(cdim));
  for (LocationId l = 0; l < ta.location_count(); ++l)
    if (!ta.is_final(l)) avoid[l].add(all);
  std::size_t work = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Federation> next(ta.location_count(), Federation(cdim));
    for (const auto& t : ta.transitions()) {
      if (ta.is_final(t.from) || ta.is_final(t.to) || avoid[t.to].is_empty()) continue;
      Federation pre = pre_transition(ta, t, avoid[t.to]);
      count_work(work, pre.size() + 1, max_iterations);
      next[t.from].unite(pre);
    }
    for (LocationId l = 0; l < ta.location_count(); ++l) {
      if (ta.is_final(l)) continue;
      Federation shrunk = avoid[l].intersection(next[l]);
      if (!shrunk.includes(avoid[l])) {
        avoid[l] = std::move(shrunk);
        changed = true;
      }
    }
  }
  ConfigSet inev(ta.dim(), ta.abs_index());
  for (LocationId l = 0; l < ta.location_count(); ++l) {
    Federation good = ta.is_final(l) ? Federation(all) : Federation(all).difference(avoid[l]);
    inev.add(l, lift_abs(good, ta.dim(), ta.abs_index()));
  }
  return inev;
}

PropertySets precompute(const TimedAutomaton& ta, std::size_t max_iterations) {
  PropertySets sets;
  sets.mode = ta.mode();
  sets.never = compute_never(ta, max_iterations);
  sets.inev = ConfigSet(ta.dim(), ta.abs_index());
  if (ta.mode() == PropertyMode::Absorbing) sets.inev = compute_inev(ta, max_iterations);
  if (sets.inev.intersects(sets.never)) throw Error("internal error: Inev and Never intersect");
  return sets;
}

Flags classify(const ConfigSet& state, const PropertySets& sets) {
  if (state.is_empty())
    throw AssumptionViolation("compatible-trace", "monitor state is empty (corrupt input or skew bound violated)");
  Flags f;
  f.inev = state.intersects(sets.inev);
  f.never = state.intersects(sets.never);
  f.other = !state.difference(sets.inev).difference(sets.never).is_empty();
  return f;
}

std::shared_ptr<const Property> make_property(TimedAutomaton ta) {
  PropertySets sets = precompute(ta);
  return std::make_shared<const Property>(Property{std::move(ta), std::move(sets)});
}

// --- cache ------------------------------------------------------------------------

namespace {

nlohmann::json config_set_to_json(const ConfigSet& s, const TimedAutomaton* ta) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [l, fed] : s.zones()) {
    nlohmann::json zones = nlohmann::json::array();
    for (const auto& z : fed.zones()) zones.push_back(z.raw());
    out.push_back({{"location", l}, {"zones", zones}});
    if (ta) out.back()["name"] = ta->locations()[l];
  }
  return out;
}

ConfigSet config_set_from_json(const nlohmann::json& j, const TimedAutomaton& ta) {
  ConfigSet s(ta.dim(), ta.abs_index());
  for (const auto& entry : j) {
    const auto l = entry.at("location").get<LocationId>();
    if (l >= ta.location_count()) throw ValidationError("cached location out of range");
    for (const auto& raw : entry.at("zones")) {
      const auto v = raw.get<std::vector<std::int64_t>>();
      s.add(l, Dbm::from_raw(ta.dim(), ta.abs_index(), v));
    }
  }
  return s;
}

}  // namespace

nlohmann::json property_sets_to_json(const PropertySets& sets, const std::string& content_hash) {
  return {{"hash", content_hash},
          {"mode", sets.mode == PropertyMode::Absorbing ? "absorbing" : "never-only"},
          {"inev", config_set_to_json(sets.inev, nullptr)},
          {"never", config_set_to_json(sets.never, nullptr)}};
}

std::optional<PropertySets> property_sets_from_json(const nlohmann::json& doc, const TimedAutomaton& ta,
                                                    const std::string& content_hash) {
  if (doc.value("hash", std::string{}) != content_hash) return std::nullopt;
  PropertySets sets;
  sets.mode = doc.at("mode").get<std::string>() == "absorbing" ? PropertyMode::Absorbing : PropertyMode::NeverOnly;
  sets.inev = config_set_from_json(doc.at("inev"), ta);
  sets.never = config_set_from_json(doc.at("never"), ta);
  return sets;
}

}  // namespace dtmon
