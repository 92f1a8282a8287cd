#include "dtmon/oracle.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "dtmon/error.hpp"

namespace dtmon::oracle {

std::int64_t grid_denominator(std::size_t clocks) { return std::max<std::int64_t>(2, std::int64_t(clocks) + 1); }

// --- decomposition --------------------------------------------------------------

namespace {

bool inside_window(const TimeInterval& iv, Ticks horizon) {
  return !iv.upper_infinite() && *iv.ub() <= horizon;
}

bool meets_window(const TimeInterval& iv, Ticks horizon) {
  if (iv.is_empty()) return false;
  return iv.lb() < horizon || (iv.lb() == horizon && !iv.lower_strict());
}

// Kept events on each component form a prefix; dropped ones may lie after the
// window, kept ones may lie inside it.
bool valid_mask(const ApproxTimedWord& w, std::uint32_t mask, Ticks horizon) {
  std::map<int, bool> dropped_seen;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto& e = w.events[k];
    const bool kept = (mask >> k) & 1U;
    if (kept) {
      if (dropped_seen[e.action.component]) return false;
      if (!meets_window(e.interval, horizon)) return false;
    } else {
      dropped_seen[e.action.component] = true;
      if (inside_window(e.interval, horizon)) return false;
    }
  }
  return true;
}

bool keeps_component_order(const std::vector<ApproxEvent>& perm, const std::vector<ApproxEvent>& orig,
                           const std::vector<std::size_t>& order) {
  std::map<int, std::size_t> last;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const int c = orig[order[k]].action.component;
    auto it = last.find(c);
    if (it != last.end() && it->second > order[k]) return false;
    last[c] = order[k];
  }
  return true;
}

template <class F>
void for_each_mask(const ApproxTimedWord& w, Ticks horizon, std::size_t max_events, F&& visit) {
  if (w.size() > max_events) throw ResourceLimit("oracle word too long");
  const std::uint32_t limit = std::uint32_t{1} << w.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (!valid_mask(w, mask, horizon)) continue;
    ApproxTimedWord kept, dropped;
    for (std::size_t k = 0; k < w.size(); ++k) ((mask >> k) & 1U ? kept : dropped).events.push_back(w.events[k]);
    visit(kept, dropped);
  }
}

template <class F>
void for_each_order(const ApproxTimedWord& w, F&& visit) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    ApproxTimedWord perm;
    for (std::size_t k : order) perm.events.push_back(w.events[k]);
    if (keeps_component_order(perm.events, w.events, order)) visit(perm);
  } while (std::next_permutation(order.begin(), order.end()));
}

}  // namespace

std::vector<Decomposition> naive_decompose(const ApproxTimedWord& word, Ticks horizon, std::size_t max_events) {
  std::vector<Decomposition> out;
  for_each_mask(word, horizon, max_events, [&](const ApproxTimedWord& kept, const ApproxTimedWord& dropped) {
    for_each_order(kept, [&](const ApproxTimedWord& perm) { out.push_back({perm, dropped}); });
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ApproxTimedWord> naive_restrict(const ApproxTimedWord& word, Ticks horizon, std::size_t max_events) {
  std::vector<ApproxTimedWord> out;
  const TimeInterval window = TimeInterval::closed(0, horizon);
  for_each_mask(word, horizon, max_events, [&](const ApproxTimedWord& kept, const ApproxTimedWord&) {
    ApproxTimedWord cut;
    for (const auto& e : kept.events) cut.events.push_back({e.action, intersect(e.interval, window)});
    out.push_back(cut);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool naive_unordered_member(const ApproxTimedWord& word, const TimedWord& candidate) {
  if (word.size() != candidate.size()) return false;
  for (std::size_t k = 1; k < candidate.size(); ++k)
    if (candidate.events[k].date < candidate.events[k - 1].date) return false;
  std::map<int, std::vector<const ApproxEvent*>> expected;
  std::map<int, std::vector<const Event*>> actual;
  for (const auto& e : word.events) expected[e.action.component].push_back(&e);
  for (const auto& e : candidate.events) actual[e.action.component].push_back(&e);
  if (expected.size() != actual.size()) return false;
  for (const auto& [c, exp] : expected) {
    const auto& act = actual[c];
    if (act.size() != exp.size()) return false;
    for (std::size_t k = 0; k < exp.size(); ++k)
      if (act[k]->action.name != exp[k]->action.name || !exp[k]->interval.contains(act[k]->date)) return false;
  }
  return true;
}

// --- difference constraints ------------------------------------------------------

namespace {

bool less(const Bnd& a, const Bnd& b) {
  if (a.inf) return false;
  if (b.inf) return true;
  return a.v < b.v || (a.v == b.v && a.strict && !b.strict);
}

Bnd plus(const Bnd& a, const Bnd& b) {
  if (a.inf || b.inf) return {};
  return {a.v + b.v, a.strict || b.strict, false};
}

bool admits(const Bnd& b, std::int64_t diff) {
  if (b.inf) return true;
  return b.strict ? diff < b.v : diff <= b.v;
}

struct System {
  std::vector<std::vector<Bnd>> m;

  explicit System(std::size_t n) : m(n, std::vector<Bnd>(n)) {
    for (std::size_t i = 0; i < n; ++i) m[i][i] = {0, false, false};
  }
  void add(std::size_t i, std::size_t j, std::int64_t v, bool strict) {
    const Bnd b{v, strict, false};
    if (less(b, m[i][j])) m[i][j] = b;
  }
  bool close() {
    const std::size_t n = m.size();
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const Bnd via = plus(m[i][k], m[k][j]);
          if (less(via, m[i][j])) m[i][j] = via;
        }
    for (std::size_t i = 0; i < n; ++i)
      if (less(m[i][i], Bnd{0, false, false})) return false;
    return true;
  }
};

struct Step {
  std::size_t node;
  const Transition* t;
  std::vector<std::size_t> resets_before;  // reset node of each clock when the event fires
};

}  // namespace

void ExactState::add_ordered(const ApproxTimedWord& word, Ticks horizon) {
  if (!paths_.empty() && horizon != horizon_) throw std::invalid_argument("ExactState: mixed horizons");
  horizon_ = horizon;
  const TimedAutomaton& ta = *ta_;
  const std::size_t m = word.size();
  const std::size_t end = m + 1;
  const std::int64_t d = den_;
  std::vector<std::size_t> action_index;
  for (const auto& e : word.events) action_index.push_back(ta.alphabet().index_of(e.action.name));

  std::vector<Step> steps;
  std::vector<std::size_t> resets(ta.clock_count() + 1, 0);

  auto emit = [&](LocationId loc) {
    System s(m + 2);
    s.add(end, 0, horizon * d, false);
    s.add(0, end, -horizon * d, false);
    for (std::size_t i = 1; i <= m; ++i) {
      s.add(i - 1, i, 0, false);
      s.add(i, end, 0, false);
      const auto& iv = word.events[i - 1].interval;
      if (iv.is_empty()) return;
      s.add(0, i, -iv.lb() * d, iv.lower_strict());
      if (!iv.upper_infinite()) s.add(i, 0, *iv.ub() * d, iv.upper_strict());
    }
    for (const auto& st : steps) {
      for (const auto& c : st.t->guard) {
        // clock values at the firing date: x = d_node - d_reset(x)
        std::size_t hi = st.node, lo = st.resets_before[c.lhs];
        if (c.rhs) {
          hi = st.resets_before[*c.rhs];
          lo = st.resets_before[c.lhs];
        }
        const std::int64_t k = c.constant * d;
        switch (c.op) {
          case CmpOp::Lt: s.add(hi, lo, k, true); break;
          case CmpOp::Le: s.add(hi, lo, k, false); break;
          case CmpOp::Eq:
            s.add(hi, lo, k, false);
            s.add(lo, hi, -k, false);
            break;
          case CmpOp::Ge: s.add(lo, hi, -k, false); break;
          case CmpOp::Gt: s.add(lo, hi, -k, true); break;
        }
      }
    }
    if (!s.close()) return;
    paths_.push_back({loc, resets, end, std::move(s.m), d});
  };

  auto dfs = [&](auto&& self, std::size_t i, LocationId loc) -> void {
    if (i == m) {
      emit(loc);
      return;
    }
    for (std::size_t k : ta.outgoing(loc, action_index[i])) {
      const Transition& t = ta.transitions()[k];
      steps.push_back({i + 1, &t, resets});
      const auto saved = resets;
      for (std::size_t r : t.reset) resets[r] = i + 1;
      self(self, i + 1, t.to);
      resets = saved;
      steps.pop_back();
    }
  };
  dfs(dfs, 0, ta.initial());
}

void ExactState::add_restricted(const ApproxTimedWord& word, Ticks horizon, std::size_t max_events) {
  if (!paths_.empty() && horizon != horizon_) throw std::invalid_argument("ExactState: mixed horizons");
  horizon_ = horizon;
  for (const auto& kept : naive_restrict(word, horizon, max_events))
    for_each_order(kept, [&](const ApproxTimedWord& perm) { add_ordered(perm, horizon); });
}

bool ExactState::contains(LocationId l, std::span<const std::int64_t> point) const {
  const std::int64_t end_value = horizon_ * den_;
  for (const auto& p : paths_) {
    if (p.location != l) continue;
    std::map<std::size_t, std::int64_t> fixed{{0, 0}, {p.end_node, end_value}};
    bool ok = true;
    for (std::size_t x = 1; x < p.reset_node.size() && ok; ++x) {
      const std::int64_t date = end_value - point[x];
      auto [it, fresh] = fixed.emplace(p.reset_node[x], date);
      if (!fresh && it->second != date) ok = false;
    }
    for (auto a = fixed.begin(); ok && a != fixed.end(); ++a)
      for (auto b = fixed.begin(); ok && b != fixed.end(); ++b)
        if (a != b && !admits(p.m[a->first][b->first], a->second - b->second)) ok = false;
    if (ok) return true;
  }
  return false;
}

std::vector<std::vector<std::int64_t>> grid_points(std::size_t clocks, Ticks horizon, std::int64_t den) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> p(clocks + 1, 0);
  const std::int64_t top = horizon * den;
  auto rec = [&](auto&& self, std::size_t x) -> void {
    if (x > clocks) {
      out.push_back(p);
      return;
    }
    for (std::int64_t v = 0; v <= top; ++v) {
      p[x] = v;
      self(self, x + 1);
    }
  };
  rec(rec, 1);
  return out;
}

// --- regions --------------------------------------------------------------------

RegionOracle::RegionOracle(const TimedAutomaton& ta) : ta_(&ta), maxc_(ta.clock_count() + 1, 0) {
  for (const auto& t : ta.transitions())
    for (const auto& c : t.guard) {
      if (c.rhs) throw ValidationError("region oracle supports diagonal-free guards only");
      maxc_[c.lhs] = std::max(maxc_[c.lhs], c.constant);
    }
}

void RegionOracle::normalize(Region& r) const {
  std::vector<int> ranks;
  for (int k : r.rank)
    if (k > 0) ranks.push_back(k);
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  for (int& k : r.rank)
    if (k > 0) k = static_cast<int>(std::lower_bound(ranks.begin(), ranks.end(), k) - ranks.begin()) + 1;
}

RegionOracle::Region RegionOracle::region_of(std::span<const std::int64_t> point, std::int64_t den) const {
  const std::size_t k = ta_->clock_count();
  Region r{std::vector<std::int64_t>(k + 1, 0), std::vector<int>(k + 1, 0)};
  std::vector<std::int64_t> fracs;
  for (std::size_t x = 1; x <= k; ++x)
    if (point[x] <= maxc_[x] * den && point[x] % den != 0) fracs.push_back(point[x] % den);
  std::sort(fracs.begin(), fracs.end());
  fracs.erase(std::unique(fracs.begin(), fracs.end()), fracs.end());
  for (std::size_t x = 1; x <= k; ++x) {
    if (point[x] > maxc_[x] * den) {
      r.ip[x] = maxc_[x] + 1;
      r.rank[x] = -1;
      continue;
    }
    r.ip[x] = point[x] / den;
    const std::int64_t f = point[x] % den;
    r.rank[x] = f == 0 ? 0 : static_cast<int>(std::lower_bound(fracs.begin(), fracs.end(), f) - fracs.begin()) + 1;
  }
  return r;
}

std::optional<RegionOracle::Region> RegionOracle::delay_successor(const Region& r) const {
  const std::size_t k = ta_->clock_count();
  bool any_zero = false, any_open = false;
  int top = 0;
  for (std::size_t x = 1; x <= k; ++x) {
    if (r.rank[x] < 0) continue;
    any_open = true;
    any_zero = any_zero || r.rank[x] == 0;
    top = std::max(top, r.rank[x]);
  }
  if (!any_open) return std::nullopt;
  Region s = r;
  for (std::size_t x = 1; x <= k; ++x) {
    if (s.rank[x] < 0) continue;
    if (any_zero) {
      if (s.rank[x] == 0 && s.ip[x] == maxc_[x]) {
        s.ip[x] = maxc_[x] + 1;
        s.rank[x] = -1;
      } else {
        s.rank[x] += 1;
      }
    } else if (s.rank[x] == top) {
      s.ip[x] += 1;
      s.rank[x] = 0;
    }
  }
  normalize(s);
  return s;
}

bool RegionOracle::satisfies(const Region& r, const ClockConstraint& c) const {
  const std::size_t x = c.lhs;
  if (r.rank[x] < 0) return c.op == CmpOp::Ge || c.op == CmpOp::Gt;
  const bool lt = r.ip[x] < c.constant;
  const bool eq = r.ip[x] == c.constant && r.rank[x] == 0;
  switch (c.op) {
    case CmpOp::Lt: return lt;
    case CmpOp::Le: return lt || eq;
    case CmpOp::Eq: return eq;
    case CmpOp::Ge: return !lt;
    case CmpOp::Gt: return !(lt || eq);
  }
  return false;
}

std::size_t RegionOracle::explore(const Node& start) {
  if (auto it = index_.find(start); it != index_.end()) return it->second;
  auto intern = [&](const Node& n, std::deque<std::size_t>& work) {
    auto [it, fresh] = index_.emplace(n, nodes_.size());
    if (fresh) {
      nodes_.push_back(n);
      delay_.emplace_back();
      discrete_.emplace_back();
      work.push_back(it->second);
    }
    return it->second;
  };
  std::deque<std::size_t> work;
  const std::size_t first = intern(start, work);
  while (!work.empty()) {
    const std::size_t id = work.front();
    work.pop_front();
    const Node node = nodes_[id];
    if (auto next = delay_successor(node.second)) delay_[id] = intern({node.first, *next}, work);
    for (std::size_t a = 0; a < ta_->alphabet().actions().size(); ++a)
      for (std::size_t k : ta_->outgoing(node.first, a)) {
        const Transition& t = ta_->transitions()[k];
        if (!std::all_of(t.guard.begin(), t.guard.end(),
                         [&](const ClockConstraint& c) { return satisfies(node.second, c); }))
          continue;
        Region r = node.second;
        for (std::size_t x : t.reset) {
          r.ip[x] = 0;
          r.rank[x] = 0;
        }
        normalize(r);
        const std::size_t to = intern({t.to, r}, work);
        discrete_[id].push_back(to);
      }
    if (nodes_.size() > 2'000'000) throw ResourceLimit("region graph too large");
  }
  dirty_ = true;
  return first;
}

void RegionOracle::solve() {
  if (!dirty_) return;
  const std::size_t n = nodes_.size();
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (delay_[i]) preds[*delay_[i]].push_back(i);
    for (std::size_t j : discrete_[i]) preds[j].push_back(i);
  }
  std::vector<bool> reach(n, false);
  std::deque<std::size_t> work;
  for (std::size_t i = 0; i < n; ++i)
    if (ta_->is_final(nodes_[i].first)) {
      reach[i] = true;
      work.push_back(i);
    }
  while (!work.empty()) {
    const std::size_t i = work.front();
    work.pop_front();
    for (std::size_t p : preds[i])
      if (!reach[p]) {
        reach[p] = true;
        work.push_back(p);
      }
  }
  never_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) never_[i] = !reach[i];

  avoid_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) avoid_[i] = !ta_->is_final(nodes_[i].first);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!avoid_[i]) continue;
      bool keep = false;
      for (std::optional<std::size_t> c = i; c && !keep; c = delay_[*c])
        for (std::size_t j : discrete_[*c])
          if (avoid_[j]) keep = true;
      if (!keep) {
        avoid_[i] = false;
        changed = true;
      }
    }
  }
  dirty_ = false;
}

bool RegionOracle::in_never(LocationId l, std::span<const std::int64_t> point, std::int64_t den) {
  const std::size_t id = explore({l, region_of(point, den)});
  solve();
  return never_[id];
}

bool RegionOracle::in_inev(LocationId l, std::span<const std::int64_t> point, std::int64_t den) {
  if (ta_->mode() != PropertyMode::Absorbing) return false;
  const std::size_t id = explore({l, region_of(point, den)});
  solve();
  return !avoid_[id];
}

// --- concrete runs and verdicts ---------------------------------------------------

std::optional<Concrete> concrete_run(const TimedAutomaton& ta, const TimedWord& word, Ticks horizon) {
  Concrete c{ta.initial(), std::vector<std::int64_t>(ta.clock_count() + 1, 0)};
  Ticks now = 0;
  auto advance = [&](Ticks to) {
    for (std::size_t x = 1; x < c.clocks.size(); ++x) c.clocks[x] += to - now;
    now = to;
  };
  auto holds = [&](const ClockConstraint& g) {
    const std::int64_t v = c.clocks[g.lhs] - (g.rhs ? c.clocks[*g.rhs] : 0);
    switch (g.op) {
      case CmpOp::Lt: return v < g.constant;
      case CmpOp::Le: return v <= g.constant;
      case CmpOp::Eq: return v == g.constant;
      case CmpOp::Ge: return v >= g.constant;
      case CmpOp::Gt: return v > g.constant;
    }
    return false;
  };
  for (const auto& e : word.events) {
    if (e.date < now) return std::nullopt;
    advance(e.date);
    const Transition* fired = nullptr;
    for (std::size_t k : ta.outgoing(c.location, ta.alphabet().index_of(e.action.name))) {
      const Transition& t = ta.transitions()[k];
      if (std::all_of(t.guard.begin(), t.guard.end(), holds)) {
        fired = &t;
        break;
      }
    }
    if (!fired) return std::nullopt;
    for (std::size_t r : fired->reset) c.clocks[r] = 0;
    c.location = fired->to;
  }
  if (horizon < now) return std::nullopt;
  advance(horizon);
  return c;
}

Flags naive_flags(const ExactState& state, RegionOracle& regions) {
  Flags f;
  state.for_each_point([&](LocationId l, const std::vector<std::int64_t>& p) {
    const bool inev = regions.in_inev(l, p, state.den());
    const bool never = regions.in_never(l, p, state.den());
    f.inev = f.inev || inev;
    f.never = f.never || never;
    f.other = f.other || (!inev && !never);
  });
  return f;
}

Verdict naive_verdict(const TimedAutomaton& ta, RegionOracle& regions,
                      const std::vector<std::pair<ApproxTimedWord, Ticks>>& updates) {
  const std::int64_t den = grid_denominator(ta.clock_count());
  const std::vector<std::int64_t> origin(ta.clock_count() + 1, 0);
  bool inev = regions.in_inev(ta.initial(), origin, den);
  bool never = regions.in_never(ta.initial(), origin, den);
  bool other = !inev && !never;
  Verdict v = verdict_from_flags(inev, never, other);
  for (const auto& [word, horizon] : updates) {
    if (is_definitive(v)) break;
    ExactState s(ta, den);
    s.add_restricted(word, horizon);
    const Flags f = naive_flags(s, regions);
    inev = inev || f.inev;
    never = never || f.never;
    other = other && f.other;
    v = verdict_from_flags(inev, never, other);
  }
  return v;
}

}  // namespace dtmon::oracle
