#include "dtmon/zones.hpp"

#include <algorithm>
#include <stdexcept>

namespace dtmon {

bool Bound::admits_scaled(std::int64_t d, std::int64_t den) const {
  if (is_infinite()) return true;
  const std::int64_t c = value() * den;
  return strict() ? d < c : d <= c;
}

std::string Bound::to_string() const {
  if (is_infinite()) return "<inf";
  return (strict() ? "<" : "<=") + std::to_string(value());
}

// --- Dbm --------------------------------------------------------------------

Dbm::Dbm(std::size_t dim, std::optional<std::size_t> abs_index)
    : dim_(dim), abs_(abs_index), m_(dim * dim, Bound::infinity()) {
  if (dim == 0) throw std::invalid_argument("DBM dimension must include the reference clock");
  if (abs_ && *abs_ >= dim) throw std::invalid_argument("absolute clock index out of range");
  for (std::size_t i = 0; i < dim; ++i) {
    ref(i, i) = Bound::zero();
    ref(0, i) = Bound::zero();
  }
}

Dbm Dbm::universe(std::size_t dim, std::optional<std::size_t> abs_index) { return Dbm(dim, abs_index); }

Dbm Dbm::zero(std::size_t dim, std::optional<std::size_t> abs_index) {
  Dbm d(dim, abs_index);
  std::fill(d.m_.begin(), d.m_.end(), Bound::zero());
  return d;
}

void Dbm::set_empty() {
  empty_ = true;
  // Canonical representative of the empty set.
  std::fill(m_.begin(), m_.end(), Bound::lt(0));
}

void Dbm::close() {
  if (empty_) return;
  for (std::size_t k = 0; k < dim_; ++k)
    for (std::size_t i = 0; i < dim_; ++i) {
      const Bound ik = at(i, k);
      if (ik.is_infinite()) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        const Bound via = ik + at(k, j);
        if (via < at(i, j)) ref(i, j) = via;
      }
    }
  for (std::size_t i = 0; i < dim_; ++i)
    if (at(i, i) < Bound::zero()) {
      set_empty();
      return;
    }
}

Dbm& Dbm::up() {
  if (empty_) return *this;
  for (std::size_t i = 1; i < dim_; ++i) ref(i, 0) = Bound::infinity();
  close();
  return *this;
}

Dbm& Dbm::down() {
  if (empty_) return *this;
  for (std::size_t j = 1; j < dim_; ++j) {
    Bound b = Bound::zero();
    for (std::size_t i = 1; i < dim_; ++i) b = std::min(b, at(i, j));
    ref(0, j) = b;
  }
  close();
  return *this;
}

Dbm& Dbm::reset(std::size_t clock) {
  if (clock == 0 || clock >= dim_) throw std::invalid_argument("reset: clock index out of range");
  if (abs_ && clock == *abs_) throw std::logic_error("contract violation: the absolute-date clock is never reset");
  if (empty_) return *this;
  for (std::size_t j = 0; j < dim_; ++j) {
    ref(clock, j) = at(0, j);
    ref(j, clock) = at(j, 0);
  }
  ref(clock, clock) = Bound::zero();
  close();
  return *this;
}

Dbm& Dbm::free(std::size_t clock) {
  if (clock == 0 || clock >= dim_) throw std::invalid_argument("free: clock index out of range");
  if (empty_) return *this;
  for (std::size_t j = 0; j < dim_; ++j) {
    if (j == clock) continue;
    ref(clock, j) = Bound::infinity();
    ref(j, clock) = at(j, 0);
  }
  ref(0, clock) = Bound::zero();
  close();
  return *this;
}

Dbm& Dbm::constrain(std::size_t i, std::size_t j, Bound bound) {
  if (i >= dim_ || j >= dim_) throw std::invalid_argument("constrain: clock index out of range");
  if (empty_ || !(bound < at(i, j))) return *this;
  if (at(j, i) + bound < Bound::zero()) {
    set_empty();
    return *this;
  }
  ref(i, j) = bound;
  close();
  return *this;
}

Dbm& Dbm::fix(std::size_t clock, Ticks value) {
  constrain(clock, 0, Bound::le(value));
  constrain(0, clock, Bound::le(-value));
  return *this;
}

Dbm& Dbm::intersect(const Dbm& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("DBM dimension mismatch");
  if (empty_) return *this;
  if (other.empty_) {
    set_empty();
    return *this;
  }
  for (std::size_t k = 0; k < m_.size(); ++k) m_[k] = std::min(m_[k], other.m_[k]);
  close();
  return *this;
}

Dbm& Dbm::extrapolate_max(std::span<const Ticks> max_constants) {
  if (max_constants.size() != dim_) throw std::invalid_argument("extrapolation constants dimension mismatch");
  if (empty_) return *this;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      if (i == j) continue;
      Bound& b = ref(i, j);
      if (b.is_infinite()) continue;
      if (i != 0 && b > Bound::le(max_constants[i])) {
        b = Bound::infinity();
      } else if (j != 0 && b < Bound::lt(-max_constants[j])) {
        b = Bound::lt(-max_constants[j]);
      }
    }
  close();
  return *this;
}

bool Dbm::includes(const Dbm& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("DBM dimension mismatch");
  if (other.empty_) return true;
  if (empty_) return false;
  for (std::size_t k = 0; k < m_.size(); ++k)
    if (other.m_[k] > m_[k]) return false;
  return true;
}

bool Dbm::intersects(const Dbm& other) const {
  Dbm tmp = *this;
  tmp.intersect(other);
  return !tmp.is_empty();
}

std::vector<Dbm> Dbm::subtract(const Dbm& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("DBM dimension mismatch");
  if (empty_) return {};
  if (!intersects(other)) return {*this};
  std::vector<Dbm> pieces;
  Dbm rest = *this;
  for (std::size_t i = 0; i < dim_ && !rest.is_empty(); ++i)
    for (std::size_t j = 0; j < dim_ && !rest.is_empty(); ++j) {
      if (i == j) continue;
      const Bound b = other.at(i, j);
      if (b.is_infinite() || !(b < rest.at(i, j))) continue;
      Dbm piece = rest;
      piece.constrain(j, i, b.complement());
      if (!piece.is_empty()) pieces.push_back(std::move(piece));
      rest.constrain(i, j, b);
    }
  return pieces;
}

bool Dbm::contains_scaled(std::span<const std::int64_t> point, std::int64_t den) const {
  if (point.size() != dim_) throw std::invalid_argument("point dimension mismatch");
  if (empty_) return false;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      if (i != j && !at(i, j).admits_scaled(point[i] - point[j], den)) return false;
  return true;
}

std::string Dbm::to_string(const std::vector<std::string>& names) const {
  if (empty_) return "false";
  auto name = [&](std::size_t i) {
    if (i < names.size()) return names[i];
    return i == 0 ? std::string("0") : "x" + std::to_string(i);
  };
  std::string out;
  auto emit = [&](const std::string& s) {
    if (!out.empty()) out += " && ";
    out += s;
  };
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      if (i == j) continue;
      const Bound b = at(i, j);
      if (b.is_infinite()) continue;
      const std::string op = b.strict() ? "<" : "<=";
      if (j == 0) {
        emit(name(i) + op + std::to_string(b.value()));
      } else if (i == 0) {
        if (b == Bound::zero()) continue;  // x >= 0
        emit(name(j) + (b.strict() ? ">" : ">=") + std::to_string(-b.value()));
      } else {
        emit(name(i) + "-" + name(j) + op + std::to_string(b.value()));
      }
    }
  return out.empty() ? "true" : out;
}

std::vector<std::int64_t> Dbm::raw() const {
  std::vector<std::int64_t> out;
  out.reserve(m_.size());
  for (const auto& b : m_) out.push_back(b.raw());
  return out;
}

Dbm Dbm::from_raw(std::size_t dim, std::optional<std::size_t> abs_index, std::span<const std::int64_t> raw) {
  if (raw.size() != dim * dim) throw std::invalid_argument("raw DBM size mismatch");
  Dbm d(dim, abs_index);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const std::int64_t r = raw[k];
    d.m_[k] = r >= Bound::infinity().raw() ? Bound::infinity() : Bound::make(r >> 1, (r & 1) == 0);
  }
  d.close();
  return d;
}

bool Dbm::operator==(const Dbm& other) const {
  if (dim_ != other.dim_) return false;
  if (empty_ || other.empty_) return empty_ == other.empty_;
  return m_ == other.m_;
}

// --- Federation ---------------------------------------------------------------

Federation::Federation(const Dbm& zone) : dim_(zone.dim()), abs_(zone.abs_index()) { add(zone); }

void Federation::check_dim(std::size_t other) const {
  if (other != dim_) throw std::invalid_argument("federation dimension mismatch");
}

Federation& Federation::add(const Dbm& zone) {
  check_dim(zone.dim());
  if (zone.is_empty()) return *this;
  for (const auto& z : zones_)
    if (z.includes(zone)) return *this;
  std::erase_if(zones_, [&](const Dbm& z) { return zone.includes(z); });
  zones_.push_back(zone);
  return *this;
}

Federation& Federation::unite(const Federation& other) {
  check_dim(other.dim_);
  for (const auto& z : other.zones_) add(z);
  return *this;
}

namespace {

template <class Op>
void map_zones(std::vector<Dbm>& zones, std::size_t dim, std::optional<std::size_t> abs, Op op) {
  Federation rebuilt(dim, abs);
  for (auto& z : zones) {
    op(z);
    rebuilt.add(z);
  }
  zones = rebuilt.zones();
}

}  // namespace

Federation& Federation::up() {
  map_zones(zones_, dim_, abs_, [](Dbm& z) { z.up(); });
  return *this;
}

Federation& Federation::reset(std::size_t clock) {
  map_zones(zones_, dim_, abs_, [clock](Dbm& z) { z.reset(clock); });
  return *this;
}

Federation& Federation::free(std::size_t clock) {
  map_zones(zones_, dim_, abs_, [clock](Dbm& z) { z.free(clock); });
  return *this;
}

Federation& Federation::constrain(std::size_t i, std::size_t j, Bound bound) {
  map_zones(zones_, dim_, abs_, [&](Dbm& z) { z.constrain(i, j, bound); });
  return *this;
}

Federation& Federation::fix(std::size_t clock, Ticks value) {
  map_zones(zones_, dim_, abs_, [&](Dbm& z) { z.fix(clock, value); });
  return *this;
}

Federation Federation::intersection(const Dbm& zone) const {
  check_dim(zone.dim());
  Federation out(dim_, abs_);
  for (const auto& z : zones_) {
    Dbm tmp = z;
    tmp.intersect(zone);
    out.add(tmp);
  }
  return out;
}

Federation Federation::intersection(const Federation& other) const {
  check_dim(other.dim_);
  Federation out(dim_, abs_);
  for (const auto& z : other.zones_) out.unite(intersection(z));
  return out;
}

Federation Federation::difference(const Dbm& zone) const {
  check_dim(zone.dim());
  Federation out(dim_, abs_);
  for (const auto& z : zones_)
    for (const auto& piece : z.subtract(zone)) out.add(piece);
  return out;
}

Federation Federation::difference(const Federation& other) const {
  check_dim(other.dim_);
  Federation out = *this;
  for (const auto& z : other.zones_) {
    if (out.is_empty()) break;
    out = out.difference(z);
  }
  return out;
}

bool Federation::intersects(const Federation& other) const {
  check_dim(other.dim_);
  for (const auto& a : zones_)
    for (const auto& b : other.zones_)
      if (a.intersects(b)) return true;
  return false;
}

bool Federation::includes(const Federation& other) const {
  check_dim(other.dim_);
  for (const auto& z : other.zones_) {
    bool covered = std::any_of(zones_.begin(), zones_.end(), [&](const Dbm& mine) { return mine.includes(z); });
    if (!covered && !Federation(z).difference(*this).is_empty()) return false;
  }
  return true;
}

bool Federation::contains_scaled(std::span<const std::int64_t> point, std::int64_t den) const {
  return std::any_of(zones_.begin(), zones_.end(), [&](const Dbm& z) { return z.contains_scaled(point, den); });
}

std::string Federation::to_string(const std::vector<std::string>& names) const {
  if (zones_.empty()) return "false";
  std::string out;
  for (const auto& z : zones_) {
    if (!out.empty()) out += " || ";
    out += "(" + z.to_string(names) + ")";
  }
  return out;
}

Federation fed_union(const Federation& a, const Federation& b) {
  Federation out = a;
  out.unite(b);
  return out;
}

Federation fed_intersect(const Federation& a, const Federation& b) { return a.intersection(b); }

Federation fed_subtract(const Federation& a, const Federation& b) { return a.difference(b); }

bool fed_includes(const Federation& a, const Federation& b) { return a.includes(b); }

Federation fed_fix_abs(const Federation& f, Ticks date) {
  if (!f.abs_index()) throw std::invalid_argument("federation has no absolute-date clock");
  Federation out = f;
  out.fix(*f.abs_index(), date);
  return out;
}

}  // namespace dtmon
