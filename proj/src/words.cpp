#include "dtmon/words.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "dtmon/error.hpp"

namespace dtmon {

const Action& Alphabet::add(const std::string& name, int component) {
  if (component < 1) throw ValidationError("action '" + name + "': component index must be >= 1");
  if (auto it = index_.find(name); it != index_.end()) {
    const Action& existing = actions_[it->second];
    if (existing.component != component)
      throw ValidationError("action '" + name + "' belongs to components " +
                            std::to_string(existing.component) + " and " + std::to_string(component));
    return existing;
  }
  index_.emplace(name, actions_.size());
  actions_.push_back({name, component});
  components_ = std::max(components_, component);
  return actions_.back();
}

const Action* Alphabet::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &actions_[it->second];
}

const Action& Alphabet::at(const std::string& name) const {
  if (const Action* a = find(name)) return *a;
  throw ValidationError("unknown action '" + name + "'");
}

std::size_t Alphabet::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown action '" + name + "'");
  return it->second;
}

void Alphabet::set_components(int n) {
  if (n < components_) throw ValidationError("component count below highest component index");
  components_ = n;
}

void validate(const TimedWord& word) {
  Ticks prev = 0;
  for (const auto& e : word.events) {
    if (e.date < 0) throw OrderingError("negative date in timed word");
    if (e.date < prev) throw OrderingError("dates of a timed word must be non-decreasing");
    prev = e.date;
  }
}

std::string to_string(const TimedWord& word) {
  if (word.empty()) return "ε";
  std::string s;
  for (const auto& e : word.events) s += "(" + e.action.name + "," + std::to_string(e.date) + ")";
  return s;
}

std::string to_string(const ApproxTimedWord& word) {
  if (word.empty()) return "ε";
  std::string s;
  for (const auto& e : word.events) s += "(" + e.action.name + "," + e.interval.to_string() + ")";
  return s;
}

TimedWord project(const TimedWord& word, int component) {
  if (component < 1) throw ValidationError("unknown component index " + std::to_string(component));
  TimedWord out;
  for (const auto& e : word.events)
    if (e.action.component == component) out.events.push_back(e);
  return out;
}

TimedWord tensor(const TimedWord& lhs, const TimedWord& rhs) {
  TimedWord out;
  out.events.reserve(lhs.size() + rhs.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < lhs.size() || j < rhs.size()) {
    bool take_left;
    if (i == lhs.size()) {
      take_left = false;
    } else if (j == rhs.size()) {
      take_left = true;
    } else {
      const auto& l = lhs.events[i];
      const auto& r = rhs.events[j];
      take_left = l.date < r.date || (l.date == r.date && l.action.component <= r.action.component);
    }
    out.events.push_back(take_left ? lhs.events[i++] : rhs.events[j++]);
  }
  return out;
}

TimedWord restrict(const TimedWord& word, const TimeInterval& interval) {
  TimedWord out;
  for (const auto& e : word.events)
    if (interval.contains(e.date)) out.events.push_back(e);
  return out;
}

TimedWord concat(const TimedWord& lhs, const TimedWord& rhs) {
  if (!lhs.empty() && !rhs.empty() && lhs.lastt() > rhs.firstt())
    throw OrderingError("cannot concatenate: lastt(lhs)=" + std::to_string(lhs.lastt()) +
                        " > firstt(rhs)=" + std::to_string(rhs.firstt()));
  TimedWord out = lhs;
  out.events.insert(out.events.end(), rhs.events.begin(), rhs.events.end());
  return out;
}

ApproxTimedWord approximate(const TimedWord& word, Ticks skew) {
  if (skew < 0) throw ValidationError("skew must be non-negative");
  ApproxTimedWord out;
  out.events.reserve(word.size());
  for (const auto& e : word.events)
    out.events.push_back({e.action, TimeInterval::closed(std::max<Ticks>(0, e.date - skew), e.date + skew)});
  return out;
}

namespace {

// Orders by upper bound; +inf sorts last.
bool merge_before(const ApproxEvent& l, const ApproxEvent& r) {
  const auto& a = l.interval;
  const auto& b = r.interval;
  if (a.upper_infinite() != b.upper_infinite()) return b.upper_infinite();
  if (!a.upper_infinite() && *a.ub() != *b.ub()) return *a.ub() < *b.ub();
  return l.action.component <= r.action.component;
}

}  // namespace

ApproxTimedWord tensor(const ApproxTimedWord& lhs, const ApproxTimedWord& rhs) {
  ApproxTimedWord out;
  out.events.reserve(lhs.size() + rhs.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < lhs.size() || j < rhs.size()) {
    bool take_left;
    if (i == lhs.size())
      take_left = false;
    else if (j == rhs.size())
      take_left = true;
    else
      take_left = merge_before(lhs.events[i], rhs.events[j]);
    out.events.push_back(take_left ? lhs.events[i++] : rhs.events[j++]);
  }
  return out;
}

ApproxTimedWord intersect(const ApproxTimedWord& word, const TimeInterval& interval) {
  ApproxTimedWord out = word;
  for (auto& e : out.events) e.interval = intersect(e.interval, interval);
  return out;
}

ApproxTimedWord permute(const ApproxTimedWord& word, std::span<const std::size_t> order) {
  ApproxTimedWord out;
  out.events.reserve(order.size());
  for (std::size_t idx : order) out.events.push_back(word.events.at(idx));
  return out;
}

namespace {

// Per-component index lists, components in ascending order.
std::vector<std::vector<std::size_t>> by_component(const ApproxTimedWord& word) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < word.size(); ++k) groups[word.events[k].action.component].push_back(k);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [comp, idx] : groups) out.push_back(std::move(idx));
  return out;
}

// Multinomial coefficient of the group sizes, saturating at cap + 1.
std::size_t multinomial(std::span<const std::size_t> sizes, std::size_t cap) {
  // Build incrementally: C(n1+n2, n2) * ...
  std::size_t total = 0;
  std::size_t result = 1;
  for (std::size_t s : sizes) {
    for (std::size_t k = 1; k <= s; ++k) {
      ++total;
      // result = result * total / k, exact at every step
      unsigned __int128 r = static_cast<unsigned __int128>(result) * total / k;
      if (r > cap) return cap + 1;
      result = static_cast<std::size_t>(r);
    }
  }
  return result;
}

void permutations_rec(const std::vector<std::vector<std::size_t>>& groups, std::vector<std::size_t>& heads,
                      std::vector<std::size_t>& order, std::size_t total,
                      const std::function<void(std::span<const std::size_t>)>& visit) {
  if (order.size() == total) {
    visit(order);
    return;
  }
  // Candidates in ascending original index gives lexicographic output.
  std::vector<std::pair<std::size_t, std::size_t>> cand;
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (heads[g] < groups[g].size()) cand.emplace_back(groups[g][heads[g]], g);
  std::sort(cand.begin(), cand.end());
  for (auto [idx, g] : cand) {
    ++heads[g];
    order.push_back(idx);
    permutations_rec(groups, heads, order, total, visit);
    order.pop_back();
    --heads[g];
  }
}

// Range of admissible kept-prefix lengths on one component for ⪯_[interval].
struct PrefixRange {
  std::size_t min_keep;
  std::size_t max_keep;
};

std::optional<PrefixRange> prefix_range(const ApproxTimedWord& word, const std::vector<std::size_t>& group,
                                        const TimeInterval& interval) {
  std::size_t min_keep = 0;
  std::size_t max_keep = 0;
  bool leading = true;
  for (std::size_t p = 0; p < group.size(); ++p) {
    const auto& iv = word.events[group[p]].interval;
    if (iv.subset_of(interval)) min_keep = p + 1;  // cannot be dropped
    if (leading && iv.intersects(interval))
      max_keep = p + 1;
    else
      leading = false;
  }
  if (min_keep > max_keep) return std::nullopt;
  return PrefixRange{min_keep, max_keep};
}

// Visits every admissible kept mask (per-component prefix lengths).
template <class Visit>
bool for_each_kept_mask(const ApproxTimedWord& word, const TimeInterval& interval, Visit&& visit) {
  const auto groups = by_component(word);
  std::vector<PrefixRange> ranges;
  for (const auto& g : groups) {
    auto r = prefix_range(word, g, interval);
    if (!r) return false;
    ranges.push_back(*r);
  }
  std::vector<std::size_t> keep(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) keep[g] = ranges[g].min_keep;
  std::vector<bool> mask(word.size());
  while (true) {
    std::fill(mask.begin(), mask.end(), false);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t p = 0; p < keep[g]; ++p) mask[groups[g][p]] = true;
    visit(mask);
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      if (keep[g] < ranges[g].max_keep) {
        ++keep[g];
        break;
      }
      keep[g] = ranges[g].min_keep;
    }
    if (g == groups.size()) break;
  }
  return true;
}

void split(const ApproxTimedWord& word, const std::vector<bool>& mask, ApproxTimedWord& kept,
           ApproxTimedWord& dropped) {
  kept.events.clear();
  dropped.events.clear();
  for (std::size_t k = 0; k < word.size(); ++k) (mask[k] ? kept : dropped).events.push_back(word.events[k]);
}

std::vector<std::size_t> group_sizes(const ApproxTimedWord& word) {
  std::vector<std::size_t> sizes;
  for (const auto& g : by_component(word)) sizes.push_back(g.size());
  return sizes;
}

}  // namespace

std::optional<std::size_t> count_valid_permutations(const ApproxTimedWord& word, std::size_t cap) {
  auto sizes = group_sizes(word);
  std::size_t n = multinomial(sizes, cap);
  if (n > cap) return std::nullopt;
  return n;
}

void for_each_valid_permutation(const ApproxTimedWord& word,
                                const std::function<void(std::span<const std::size_t>)>& visit) {
  const auto groups = by_component(word);
  std::vector<std::size_t> heads(groups.size(), 0);
  std::vector<std::size_t> order;
  order.reserve(word.size());
  permutations_rec(groups, heads, order, word.size(), visit);
}

std::vector<std::vector<std::size_t>> valid_permutations(const ApproxTimedWord& word, std::size_t cap) {
  if (!count_valid_permutations(word, cap))
    throw ResourceLimit("valid permutation count exceeds cap " + std::to_string(cap));
  std::vector<std::vector<std::size_t>> out;
  for_each_valid_permutation(word, [&](std::span<const std::size_t> o) { out.emplace_back(o.begin(), o.end()); });
  return out;
}

bool is_subword_conditioned(const ApproxTimedWord& sub, const ApproxTimedWord& word,
                            const TimeInterval& interval) {
  // With the per-component prefix reading, the kept set is determined by the
  // number of kept events on each component.
  std::map<int, std::size_t> kept_per_comp;
  for (const auto& e : sub.events) ++kept_per_comp[e.action.component];
  std::map<int, std::size_t> seen;
  std::vector<bool> mask(word.size(), false);
  for (std::size_t k = 0; k < word.size(); ++k) {
    int c = word.events[k].action.component;
    if (seen[c]++ < kept_per_comp[c]) mask[k] = true;
  }
  for (const auto& [c, n] : kept_per_comp)
    if (seen[c] < n) return false;
  ApproxTimedWord kept;
  ApproxTimedWord dropped;
  split(word, mask, kept, dropped);
  if (kept != sub) return false;
  for (const auto& e : dropped.events)
    if (e.interval.subset_of(interval)) return false;
  for (const auto& e : kept.events)
    if (!e.interval.intersects(interval)) return false;
  return true;
}

std::vector<ApproxTimedWord> restrict(const ApproxTimedWord& word, Ticks horizon, std::size_t cap) {
  const TimeInterval window = TimeInterval::closed(0, horizon);
  std::set<ApproxTimedWord> out;
  ApproxTimedWord kept;
  ApproxTimedWord dropped;
  std::size_t visited = 0;
  for_each_kept_mask(word, window, [&](const std::vector<bool>& mask) {
    if (++visited > cap) throw ResourceLimit("restriction candidate count exceeds cap " + std::to_string(cap));
    split(word, mask, kept, dropped);
    out.insert(intersect(kept, window));
  });
  return {out.begin(), out.end()};
}

std::vector<Decomposition> decompose(const ApproxTimedWord& word, Ticks horizon, std::size_t cap) {
  const TimeInterval window = TimeInterval::closed(0, horizon);
  std::vector<std::vector<bool>> masks;
  std::size_t candidates = 0;
  ApproxTimedWord kept;
  ApproxTimedWord dropped;
  for_each_kept_mask(word, window, [&](const std::vector<bool>& mask) {
    split(word, mask, kept, dropped);
    auto n = count_valid_permutations(kept, cap);
    candidates += n.value_or(cap + 1);
    if (candidates > cap) throw ResourceLimit("decomposition candidate count exceeds cap " + std::to_string(cap));
    masks.push_back(mask);
  });
  std::vector<Decomposition> out;
  out.reserve(candidates);
  for (const auto& mask : masks) {
    split(word, mask, kept, dropped);
    for_each_valid_permutation(kept, [&](std::span<const std::size_t> order) {
      out.push_back({permute(kept, order), dropped});
    });
  }
  return out;
}

bool ordered_member(const ApproxTimedWord& word, const TimedWord& candidate) {
  if (word.size() != candidate.size()) return false;
  Ticks prev = std::numeric_limits<Ticks>::min();
  for (std::size_t k = 0; k < word.size(); ++k) {
    const auto& e = candidate.events[k];
    if (e.action != word.events[k].action) return false;
    if (!word.events[k].interval.contains(e.date)) return false;
    if (e.date < prev) return false;
    prev = e.date;
  }
  return true;
}

bool unordered_member(const ApproxTimedWord& word, const TimedWord& candidate) {
  if (word.size() != candidate.size()) return false;
  bool found = false;
  for_each_valid_permutation(word, [&](std::span<const std::size_t> order) {
    if (!found && ordered_member(permute(word, order), candidate)) found = true;
  });
  return found;
}

}  // namespace dtmon
