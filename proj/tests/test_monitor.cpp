#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dtmon/error.hpp"
#include "dtmon/monitor.hpp"
#include "dtmon/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace dtmon;

namespace {

bool same_entries(Cs a, Cs b) {
  if (a.size() != b.size()) return false;
  for (const auto& e : a) {
    const bool found = std::any_of(b.begin(), b.end(), [&](const CsEntry& o) {
      return o.remainder == e.remainder && o.configs.equals(e.configs);
    });
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("verdict table") {
  CHECK(verdict_from_flags(true, true, false) == Verdict::Inconc);
  CHECK(verdict_from_flags(true, true, true) == Verdict::Inconc);
  CHECK(verdict_from_flags(true, false, false) == Verdict::True);
  CHECK(verdict_from_flags(false, true, false) == Verdict::False);
  CHECK(verdict_from_flags(true, false, true) == Verdict::PTrue);
  CHECK(verdict_from_flags(false, true, true) == Verdict::PFalse);
  CHECK(verdict_from_flags(false, false, true) == Verdict::Pending);
  CHECK(verdict_from_flags(false, false, false) == Verdict::Pending);
}

TEST_CASE("verdict preorder") {
  using V = Verdict;
  CHECK(verdict_leq(V::Pending, V::Inconc));
  CHECK(verdict_leq(V::PTrue, V::True));
  CHECK(verdict_leq(V::PTrue, V::Inconc));
  CHECK_FALSE(verdict_leq(V::PTrue, V::False));
  CHECK_FALSE(verdict_leq(V::PTrue, V::PFalse));
  CHECK_FALSE(verdict_leq(V::True, V::Inconc));
  CHECK_FALSE(verdict_leq(V::Inconc, V::True));
  CHECK_FALSE(verdict_leq(V::True, V::Pending));
  CHECK(verdict_from_string("PFalse") == V::PFalse);
  CHECK_THROWS_AS(verdict_from_string("maybe"), ValidationError);
}

TEST_CASE("jtmin") {
  JTmin j(3);
  CHECK(j.tmin1() == 0);
  j.update(1, 10000);
  j.update(2, 5000);
  j.update(3, 5500);
  CHECK(j.entries()[0] == JTmin::Entry{2, 5000});
  CHECK(j.entries()[1] == JTmin::Entry{3, 5500});
  CHECK(j.entries()[2] == JTmin::Entry{1, 10000});
  CHECK(j.tmin1() == 5000);
  j.update(2, 5000);
  CHECK_THROWS_AS(j.update(2, 4000), AssumptionViolation);
}

TEST_CASE("adding events") {
  const auto ta = testing::last_action_automaton();
  const auto& al = ta.alphabet();
  const Cs cs = initial_cs(ta);
  CHECK(cs_add_events(cs, {}).front().remainder.empty());
  const ApproxTimedWord b{{{al.at("b"), TimeInterval::closed(4300, 5700)}}};
  const auto added = cs_add_events(cs, b);
  REQUIRE(added.size() == 1);
  CHECK(added[0].remainder.size() == 1);

  testing::Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    const auto u = testing::random_atw(rng, al, 3, 10, 2);
    const auto v = testing::random_atw(rng, al, 3, 10, 2);
    CHECK(cs_add_events(cs_add_events(cs, u), v)[0].remainder == cs_add_events(cs, tensor(u, v))[0].remainder);
  }
}

TEST_CASE("update with an empty remainder is the identity") {
  const auto ta = testing::last_action_automaton();
  const Cs cs = initial_cs(ta);
  CHECK(same_entries(cs_next(ta, cs, 3000), cs));
}

TEST_CASE("CS update keeps five shapes per base configuration") {
  const auto ta = testing::last_action_automaton();
  const auto& al = ta.alphabet();
  const auto sigma = testing::m1_collected(al);
  const Ticks skew = 700;
  Cs base = cs_next(ta, cs_add_events(initial_cs(ta), testing::atw_of(sigma, 0, 3, skew)), 4000);
  REQUIRE_FALSE(base.empty());
  for (const auto& entry : base) CHECK(entry.remainder.empty());
  const auto rest = testing::atw_of(sigma, 3, 7, skew);
  for (const auto& entry : base) {
    const Cs next = cs_next(ta, cs_add_events(Cs{entry}, rest), 4800);
    CHECK(next.size() == 5);
    std::vector<std::size_t> remainder_sizes;
    for (const auto& e : next) remainder_sizes.push_back(e.remainder.size());
    std::sort(remainder_sizes.begin(), remainder_sizes.end());
    CHECK(remainder_sizes == std::vector<std::size_t>{2, 2, 3, 3, 4});
  }
}

TEST_CASE("cs_state of the initial structure") {
  const auto ta = testing::last_action_automaton();
  const auto s = cs_state(ta, initial_cs(ta), 2500);
  CHECK(s.contains_scaled(ta.initial(), std::vector<std::int64_t>{0, 2500, 2500}, 1));
  CHECK_FALSE(s.contains_scaled(ta.initial(), std::vector<std::int64_t>{0, 2400, 2500}, 1));
}

TEST_CASE("cs_state matches the oracle") {
  testing::Rng rng(77);
  for (int k = 0; k < 60; ++k) {
    const auto al = testing::random_alphabet(rng, 2);
    const auto ta = testing::random_automaton(rng, al);
    const Ticks skew = testing::uniform(rng, 0, 2);
    const auto w = testing::random_atw(rng, al, static_cast<int>(testing::uniform(rng, 0, 5)), 8, skew);
    const Ticks T = testing::uniform(rng, 0, 10);
    const auto state = cs_state(ta, cs_next(ta, cs_add_events(initial_cs(ta), w), T), T);
    const auto den = oracle::grid_denominator(ta.clock_count());
    oracle::ExactState exact(ta, den);
    exact.add_restricted(w, T);
    for (auto p : oracle::grid_points(ta.clock_count(), T, den))
      for (LocationId l = 0; l < ta.location_count(); ++l) {
        const bool want = exact.contains(l, p);
        p.push_back(T * den);
        CHECK(state.contains_scaled(l, p, den) == want);
        p.pop_back();
      }
  }
}

TEST_CASE("monitor waits for the frontier") {
  auto property = make_property(testing::last_action_automaton());
  const auto& al = property->automaton.alphabet();
  Monitor m(1, 3, 700, property);
  CHECK(m.tmin() == 700);
  CHECK_FALSE(m.on_receive({1, 1000, {al.at("a")}, 1}, 1000).has_value());
  CHECK_FALSE(m.on_receive({2, 3000, {al.at("b")}, 1}, 1100).has_value());
  CHECK(m.cs().front().remainder.size() == 2);
  const auto r = m.on_receive({3, 2000, {al.at("c")}, 1}, 1200);
  REQUIRE(r.has_value());
  CHECK(r->tmin1 == 1000);
  CHECK(m.frontier() == 300);
  CHECK_THROWS_AS(m.on_receive({3, 1500, {}, 2}, 1300), AssumptionViolation);
}

TEST_CASE("monitor rejects foreign actions") {
  auto property = make_property(testing::last_action_automaton());
  const auto& al = property->automaton.alphabet();
  Monitor m(1, 3, 700, property);
  CHECK_THROWS_AS(m.on_receive({1, 1000, {al.at("b")}, 1}, 1000), AssumptionViolation);
  CHECK_THROWS_AS(m.on_receive({4, 1000, {}, 1}, 1000), ValidationError);
}
