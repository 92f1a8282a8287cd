#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace dtmon {

/// Integer time at a run-wide resolution (ticks per time unit).
using Ticks = std::int64_t;

inline constexpr Ticks kDefaultResolution = 1000;

/// Interval of dates with independent strictness on each bound. The upper
/// bound may be +inf. Instances are kept in a canonical form so that
/// defaulted comparison is set equality: every empty interval compares equal
/// to `TimeInterval::empty()`, and an infinite upper bound is always strict.
class TimeInterval {
 public:
  /// Empty interval.
  TimeInterval() = default;

  static TimeInterval empty() { return {}; }
  static TimeInterval closed(Ticks lo, Ticks hi) { return make(lo, false, hi, false); }
  static TimeInterval singleton(Ticks t) { return closed(t, t); }
  /// [lo, +inf)
  static TimeInterval from(Ticks lo) { return make(lo, false, std::nullopt, true); }
  static TimeInterval make(Ticks lo, bool lo_strict, std::optional<Ticks> hi, bool hi_strict);

  bool is_empty() const { return empty_; }
  Ticks lb() const { return lo_; }
  /// nullopt means +inf.
  std::optional<Ticks> ub() const;
  bool lower_strict() const { return lo_strict_; }
  bool upper_strict() const { return hi_strict_; }
  bool upper_infinite() const { return hi_inf_; }

  bool contains(Ticks t) const;
  bool intersects(const TimeInterval& other) const;
  /// Set inclusion; the empty interval is a subset of everything.
  bool subset_of(const TimeInterval& other) const;

  std::string to_string() const;

  auto operator<=>(const TimeInterval&) const = default;

 private:
  bool empty_ = true;
  Ticks lo_ = 0;
  bool lo_strict_ = false;
  bool hi_inf_ = false;
  Ticks hi_ = 0;
  bool hi_strict_ = false;
};

TimeInterval intersect(const TimeInterval& a, const TimeInterval& b);

/// a ≺ b, i.e. ub(a) <= lb(b). Throws ValidationError on empty input.
bool precedes(const TimeInterval& a, const TimeInterval& b);

/// Formats ticks as a decimal number of time units ("4.3" for 4300 at 1000).
std::string format_ticks(Ticks t, Ticks resolution);
/// Nearest tick to a number of time units.
Ticks to_ticks(double units, Ticks resolution);

}  // namespace dtmon
