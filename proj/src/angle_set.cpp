#include "conemech/angle_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conemech/error.hpp"

namespace conemech {

double wrap_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  r -= kPi;
  // fmod can land exactly on +pi after the shift back.
  if (r >= kPi) r -= kTwoPi;
  return r;
}

AngleSet AngleSet::full() {
  AngleSet s;
  s.pieces_.push_back({-kPi, kPi});
  return s;
}

AngleSet AngleSet::from_pieces(std::vector<AngleInterval> pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const AngleInterval& x, const AngleInterval& y) {
              return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
            });
  AngleSet s;
  for (const auto& p : pieces) {
    if (!s.pieces_.empty() && p.lo <= s.pieces_.back().hi) {
      s.pieces_.back().hi = std::max(s.pieces_.back().hi, p.hi);
    } else {
      s.pieces_.push_back(p);
    }
  }
  return s;
}

AngleSet AngleSet::from_interval(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || hi < lo) {
    throw Error(ErrorKind::InvalidInput, "angle interval needs finite lo <= hi");
  }
  if (hi - lo >= kTwoPi) return full();
  const double l = wrap_angle(lo);
  const double h = l + (hi - lo);
  if (h <= kPi) return from_pieces({{l, h}});
  return from_pieces({{l, kPi}, {-kPi, h - kTwoPi}});
}

AngleSet AngleSet::from_intervals(const std::vector<AngleInterval>& arcs) {
  AngleSet acc;
  for (const auto& a : arcs) acc = acc.unite(from_interval(a.lo, a.hi));
  return acc;
}

bool AngleSet::is_full() const {
  return pieces_.size() == 1 && pieces_[0].lo == -kPi && pieces_[0].hi == kPi;
}

double AngleSet::measure() const {
  double m = 0.0;
  for (const auto& p : pieces_) m += p.width();
  return m;
}

bool AngleSet::contains(double a, double tol) const {
  const double w = wrap_angle(a);
  for (double x : {w, w + kTwoPi, w - kTwoPi}) {
    for (const auto& p : pieces_) {
      if (x >= p.lo - tol && x <= p.hi + tol) return true;
    }
  }
  return false;
}

AngleSet AngleSet::intersect(const AngleSet& other) const {
  std::vector<AngleInterval> out;
  size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const auto& p = pieces_[i];
    const auto& q = other.pieces_[j];
    const double lo = std::max(p.lo, q.lo);
    const double hi = std::min(p.hi, q.hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (p.hi < q.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  AngleSet s;
  s.pieces_ = std::move(out);
  return s;
}

AngleSet AngleSet::unite(const AngleSet& other) const {
  std::vector<AngleInterval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return from_pieces(std::move(all));
}

std::vector<AngleInterval> AngleSet::intervals() const {
  if (pieces_.empty()) return {};
  if (is_full()) return {{-kPi, kPi}};
  std::vector<AngleInterval> out = pieces_;
  if (out.size() >= 2 && out.front().lo == -kPi && out.back().hi == kPi) {
    out.back().hi = out.front().hi + kTwoPi;
    out.erase(out.begin());
  }
  std::sort(out.begin(), out.end(),
            [](const AngleInterval& x, const AngleInterval& y) { return x.lo < y.lo; });
  return out;
}

bool AngleSet::operator==(const AngleSet& other) const {
  if (pieces_.size() != other.pieces_.size()) return false;
  for (size_t k = 0; k < pieces_.size(); ++k) {
    if (pieces_[k].lo != other.pieces_[k].lo || pieces_[k].hi != other.pieces_[k].hi) {
      return false;
    }
  }
  return true;
}

double angular_distance(const AngleSet& s, double a) {
  if (s.empty()) return std::numeric_limits<double>::infinity();
  if (s.contains(a)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.pieces()) {
    for (double e : {p.lo, p.hi}) {
      best = std::min(best, std::abs(wrap_angle(a - e)));
    }
  }
  return best;
}

}  // namespace conemech
