#pragma once

// Difference bound matrices over clocks x_1..x_n with reference clock x_0.
// Entry (i, j) bounds x_i - x_j. Matrices are kept canonical (shortest-path
// closed) after every public operation.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtmon/time.hpp"

namespace dtmon {

/// Upper bound `< c`, `<= c` or `< +inf`, encoded as 2c | (non-strict).
class Bound {
 public:
  constexpr Bound() = default;

  static constexpr Bound infinity() { return Bound(kInfRaw); }
  static constexpr Bound le(Ticks c) { return Bound(c * 2 + 1); }
  static constexpr Bound lt(Ticks c) { return Bound(c * 2); }
  static constexpr Bound make(Ticks c, bool strict) { return strict ? lt(c) : le(c); }
  static constexpr Bound zero() { return le(0); }

  constexpr bool is_infinite() const { return raw_ == kInfRaw; }
  constexpr Ticks value() const { return raw_ >> 1; }
  constexpr bool strict() const { return (raw_ & 1) == 0; }
  constexpr std::int64_t raw() const { return raw_; }

  constexpr Bound operator+(Bound other) const {
    if (is_infinite() || other.is_infinite()) return infinity();
    return Bound(((raw_ & ~std::int64_t{1}) + (other.raw_ & ~std::int64_t{1})) | (raw_ & other.raw_ & 1));
  }
  /// Bound of the complement: not(x - y ⋖ c) is y - x ⋖' -c.
  constexpr Bound complement() const { return Bound(1 - raw_); }

  /// Whether the difference `d` (in ticks, scaled by `den`) satisfies the bound.
  bool admits_scaled(std::int64_t d, std::int64_t den) const;

  std::string to_string() const;

  constexpr auto operator<=>(const Bound&) const = default;

 private:
  static constexpr std::int64_t kInfRaw = (std::int64_t{1} << 60);
  constexpr explicit Bound(std::int64_t raw) : raw_(raw) {}
  std::int64_t raw_ = kInfRaw;
};

class Dbm {
 public:
  /// Universe of non-negative valuations. `abs_index`, when set, names the
  /// absolute-date clock, which may never be reset.
  explicit Dbm(std::size_t dim, std::optional<std::size_t> abs_index = std::nullopt);

  static Dbm universe(std::size_t dim, std::optional<std::size_t> abs_index = std::nullopt);
  /// All clocks equal to 0.
  static Dbm zero(std::size_t dim, std::optional<std::size_t> abs_index = std::nullopt);

  std::size_t dim() const { return dim_; }
  std::optional<std::size_t> abs_index() const { return abs_; }
  Bound at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
  bool is_empty() const { return empty_; }

  Dbm& up();
  Dbm& down();
  Dbm& reset(std::size_t clock);
  /// Removes every constraint on `clock` except clock >= 0.
  Dbm& free(std::size_t clock);
  /// Adds x_i - x_j ⋖ bound.
  Dbm& constrain(std::size_t i, std::size_t j, Bound bound);
  /// Adds clock = value.
  Dbm& fix(std::size_t clock, Ticks value);
  Dbm& intersect(const Dbm& other);
  /// Classic maximal-constant extrapolation; max_constants[0] is ignored.
  Dbm& extrapolate_max(std::span<const Ticks> max_constants);

  /// Set inclusion: *this ⊇ other.
  bool includes(const Dbm& other) const;
  bool intersects(const Dbm& other) const;
  /// Disjoint convex pieces covering *this minus other.
  std::vector<Dbm> subtract(const Dbm& other) const;

  /// Membership of a valuation given in ticks multiplied by `den`; point[0]
  /// is the reference clock and must be 0.
  bool contains_scaled(std::span<const std::int64_t> point, std::int64_t den) const;

  /// Constraint list, e.g. "x1<=3 && x2-x1<2"; `name(i)` names clock i.
  std::string to_string(const std::vector<std::string>& names = {}) const;
  /// Raw bounds row-major (for caching).
  std::vector<std::int64_t> raw() const;
  static Dbm from_raw(std::size_t dim, std::optional<std::size_t> abs_index, std::span<const std::int64_t> raw);

  /// Equality as sets (empty DBMs are equal).
  bool operator==(const Dbm& other) const;

 private:
  Bound& ref(std::size_t i, std::size_t j) { return m_[i * dim_ + j]; }
  void close();
  void set_empty();

  std::size_t dim_;
  std::optional<std::size_t> abs_;
  std::vector<Bound> m_;
  bool empty_ = false;
};

/// Finite union of non-empty canonical DBMs of one dimension, with no member
/// included in another.
class Federation {
 public:
  explicit Federation(std::size_t dim, std::optional<std::size_t> abs_index = std::nullopt)
      : dim_(dim), abs_(abs_index) {}
  explicit Federation(const Dbm& zone);

  std::size_t dim() const { return dim_; }
  std::optional<std::size_t> abs_index() const { return abs_; }
  const std::vector<Dbm>& zones() const { return zones_; }
  bool is_empty() const { return zones_.empty(); }
  std::size_t size() const { return zones_.size(); }

  Federation& add(const Dbm& zone);
  Federation& unite(const Federation& other);
  Federation& up();
  Federation& reset(std::size_t clock);
  Federation& free(std::size_t clock);
  Federation& constrain(std::size_t i, std::size_t j, Bound bound);
  /// Intersects every member with clock = value (the date filter on abs).
  Federation& fix(std::size_t clock, Ticks value);

  Federation intersection(const Dbm& zone) const;
  Federation intersection(const Federation& other) const;
  Federation difference(const Dbm& zone) const;
  Federation difference(const Federation& other) const;
  bool intersects(const Federation& other) const;
  /// *this ⊇ other.
  bool includes(const Federation& other) const;
  bool equals(const Federation& other) const { return includes(other) && other.includes(*this); }

  bool contains_scaled(std::span<const std::int64_t> point, std::int64_t den) const;

  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  void check_dim(std::size_t other) const;

  std::size_t dim_;
  std::optional<std::size_t> abs_;
  std::vector<Dbm> zones_;
};

Federation fed_union(const Federation& a, const Federation& b);
Federation fed_intersect(const Federation& a, const Federation& b);
Federation fed_subtract(const Federation& a, const Federation& b);
bool fed_includes(const Federation& a, const Federation& b);
Federation fed_fix_abs(const Federation& f, Ticks date);

}  // namespace dtmon
