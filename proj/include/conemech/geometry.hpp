#pragma once

#include <Eigen/Core>
#include <vector>

#include "conemech/angle_set.hpp"

namespace conemech {

// (fx, fy, mz) about the grasp center, gripper frame.
using PlanarWrench = Eigen::Vector3d;
// (vx, vy, omega); the linear part is the velocity of the grasp-center point.
using PlanarTwist = Eigen::Vector3d;

// Planar cross product rx*fy - ry*fx.
inline double cross2(const Eigen::Vector2d& r, const Eigen::Vector2d& f) {
  return r.x() * f.y() - r.y() * f.x();
}

// Wrench of force f applied at r (relative to the grasp center).
inline PlanarWrench lift_force(const Eigen::Vector2d& r, const Eigen::Vector2d& f) {
  return {f.x(), f.y(), cross2(r, f)};
}

class LimitSurface {
 public:
  LimitSurface(double mu_g, double N_g, double kappa);
  static LimitSurface from_patch_radius(double mu_g, double N_g, double r);

  double mu_g() const { return mu_g_; }
  double N_g() const { return N_g_; }
  double kappa() const { return kappa_; }
  // ((mu_g N_g)^2, (mu_g N_g)^2, (kappa mu_g N_g)^2)
  const Eigen::Vector3d& tau() const { return tau_; }

  double quadratic_form(const PlanarWrench& w) const;
  Eigen::Vector3d gradient(const PlanarWrench& w) const;

 private:
  double mu_g_, N_g_, kappa_;
  Eigen::Vector3d tau_;
};

inline double ls_quadratic_form(const LimitSurface& ls, const PlanarWrench& w) {
  return ls.quadratic_form(w);
}

struct WrenchWedge {
  PlanarWrench apex = PlanarWrench::Zero();
  std::vector<PlanarWrench> rays;
};

// s(theta) = m + a cos(theta) + b sin(theta) for theta in interval, with wedge
// coordinates t(theta) = t0 + c1 cos(theta) + c2 sin(theta). A single-ray wedge
// gives a point arc: a = b = 0 and a zero-width interval.
struct EllipseArc {
  PlanarWrench m = PlanarWrench::Zero();
  PlanarWrench a = PlanarWrench::Zero();
  PlanarWrench b = PlanarWrench::Zero();
  AngleInterval interval;
  Eigen::Vector2d t0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d c1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
  int ray_count = 2;

  bool is_point() const { return ray_count == 1; }
  double span() const { return interval.width(); }
  PlanarWrench at(double theta) const;
  Eigen::Vector2d wedge_coords(double theta) const;
  bool in_interval(double theta, double tol = 0.0) const;
};

// Clips the quadric Q(w) = 1 to the wedge. Throws ApexOutsideLS when Q(apex) > 1
// and DegenerateWedge for missing, zero or opposite rays. Rays closer than
// 1e-6 rad collapse to the first.
EllipseArc intersect_wedge_ellipsoid(const LimitSurface& ls, const WrenchWedge& ws);

// {theta : p + q cos(theta) + r sin(theta) >= 0}
AngleSet sinusoid_nonneg(double p, double q, double r);

}  // namespace conemech
