#pragma once

#include <vector>

namespace conemech {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

// Maps an angle onto [-pi, pi).
double wrap_angle(double a);

// Closed interval [lo, hi] on the circle, read counterclockwise from lo.
struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Finite union of closed arcs on the unit circle.
//
// Stored as sorted, disjoint closed pieces of the line segment [-pi, pi]; an
// arc crossing the cut at pi is held as two pieces touching -pi and pi. Set
// operations therefore never re-add 2*pi, which keeps intersections of
// identical sets bit-exact.
class AngleSet {
 public:
  AngleSet() = default;

  static AngleSet full();
  // Arc from lo counterclockwise to hi. hi - lo >= 2*pi yields the full circle;
  // hi < lo is rejected.
  static AngleSet from_interval(double lo, double hi);
  static AngleSet from_intervals(const std::vector<AngleInterval>& arcs);

  bool empty() const { return pieces_.empty(); }
  bool is_full() const;
  double measure() const;
  bool contains(double a, double tol = 0.0) const;

  AngleSet intersect(const AngleSet& other) const;
  AngleSet unite(const AngleSet& other) const;

  // Arcs with the cut at pi re-joined; lo in [-pi, pi), lo <= hi <= lo + 2*pi.
  std::vector<AngleInterval> intervals() const;
  const std::vector<AngleInterval>& pieces() const { return pieces_; }

  bool operator==(const AngleSet& other) const;

 private:
  static AngleSet from_pieces(std::vector<AngleInterval> pieces);
  std::vector<AngleInterval> pieces_;
};

inline AngleSet angle_set_intersect(const AngleSet& a, const AngleSet& b) {
  return a.intersect(b);
}

// Circular distance from a to the nearest point of s (0 inside); infinity
// when s is empty.
double angular_distance(const AngleSet& s, double a);

}  // namespace conemech
