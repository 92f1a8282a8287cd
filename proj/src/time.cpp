#include "dtmon/time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "dtmon/error.hpp"

namespace dtmon {

TimeInterval TimeInterval::make(Ticks lo, bool lo_strict, std::optional<Ticks> hi, bool hi_strict) {
  TimeInterval r;
  if (hi) {
    if (lo > *hi) return r;
    if (lo == *hi && (lo_strict || hi_strict)) return r;
  }
  r.empty_ = false;
  r.lo_ = lo;
  r.lo_strict_ = lo_strict;
  r.hi_inf_ = !hi.has_value();
  r.hi_ = hi.value_or(0);
  r.hi_strict_ = hi ? hi_strict : true;
  return r;
}

std::optional<Ticks> TimeInterval::ub() const {
  if (hi_inf_) return std::nullopt;
  return hi_;
}

bool TimeInterval::contains(Ticks t) const {
  if (empty_) return false;
  if (t < lo_ || (t == lo_ && lo_strict_)) return false;
  if (hi_inf_) return true;
  return t < hi_ || (t == hi_ && !hi_strict_);
}

bool TimeInterval::intersects(const TimeInterval& other) const {
  return !intersect(*this, other).is_empty();
}

bool TimeInterval::subset_of(const TimeInterval& other) const {
  if (empty_) return true;
  if (other.empty_) return false;
  // lower side: other.lo must not exceed ours
  if (lo_ < other.lo_) return false;
  if (lo_ == other.lo_ && other.lo_strict_ && !lo_strict_) return false;
  if (other.hi_inf_) return true;
  if (hi_inf_) return false;
  if (hi_ > other.hi_) return false;
  if (hi_ == other.hi_ && other.hi_strict_ && !hi_strict_) return false;
  return true;
}

std::string TimeInterval::to_string() const {
  if (empty_) return "{}";
  if (!hi_inf_ && lo_ == hi_) return "{" + std::to_string(lo_) + "}";
  std::string s = lo_strict_ ? "(" : "[";
  s += std::to_string(lo_) + ",";
  s += hi_inf_ ? "inf" : std::to_string(hi_);
  s += hi_strict_ ? ")" : "]";
  return s;
}

TimeInterval intersect(const TimeInterval& a, const TimeInterval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  Ticks lo;
  bool lo_strict;
  if (a.lb() != b.lb()) {
    const auto& hi_side = a.lb() > b.lb() ? a : b;
    lo = hi_side.lb();
    lo_strict = hi_side.lower_strict();
  } else {
    lo = a.lb();
    lo_strict = a.lower_strict() || b.lower_strict();
  }
  std::optional<Ticks> hi;
  bool hi_strict = true;
  if (a.upper_infinite() && b.upper_infinite()) {
  } else if (a.upper_infinite()) {
    hi = b.ub();
    hi_strict = b.upper_strict();
  } else if (b.upper_infinite()) {
    hi = a.ub();
    hi_strict = a.upper_strict();
  } else if (*a.ub() != *b.ub()) {
    const auto& lo_side = *a.ub() < *b.ub() ? a : b;
    hi = lo_side.ub();
    hi_strict = lo_side.upper_strict();
  } else {
    hi = a.ub();
    hi_strict = a.upper_strict() || b.upper_strict();
  }
  return TimeInterval::make(lo, lo_strict, hi, hi_strict);
}

bool precedes(const TimeInterval& a, const TimeInterval& b) {
  if (a.is_empty() || b.is_empty()) throw ValidationError("interval precedence on an empty interval");
  if (a.upper_infinite()) return false;
  return *a.ub() <= b.lb();
}

std::string format_ticks(Ticks t, Ticks resolution) {
  if (resolution <= 1) return std::to_string(t);
  std::string sign = t < 0 ? "-" : "";
  Ticks mag = std::llabs(t);
  std::string s = sign + std::to_string(mag / resolution);
  Ticks frac = mag % resolution;
  if (frac == 0) return s;
  std::string digits;
  Ticks scale = resolution;
  while (scale > 1) {
    scale /= 10;
    digits += static_cast<char>('0' + (frac / std::max<Ticks>(scale, 1)) % 10);
    if (scale == 0) break;
  }
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  return s + "." + digits;
}

Ticks to_ticks(double units, Ticks resolution) {
  return static_cast<Ticks>(std::llround(units * static_cast<double>(resolution)));
}

}  // namespace dtmon
