#pragma once

#include <cmath>
#include <vector>

#include "conemech/angle_set.hpp"
#include "conemech/contact.hpp"
#include "conemech/exec.hpp"
#include "conemech/geometry.hpp"

namespace conemech {

struct WrenchMotionSet {
  EllipseArc arc;
  Eigen::Vector3d tau;
};

// Normalized direction of s(theta) / tau: unit translation, or |omega| = 1 when
// the translation vanishes. Throws ThetaOutOfArc.
PlanarTwist wms_twist(const WrenchMotionSet& wms, double theta);

struct MotionCone {
  AngleSet angles;
  bool empty() const { return angles.empty(); }
  bool contains(double Theta, double tol = 1e-9) const { return angles.contains(Theta, tol); }
};

// Everything the cone computations need at one state.
struct ConeContext {
  ContactMode mode;
  PlanarWrench gravity;
  std::vector<PlanarWrench> contact_rays;
  WrenchMotionSet wms;
  std::vector<PlanarTwist> ems;
};

// Builds the gripper-side wedge (apex -G, rays -w_i), intersects it with the
// limit surface and collects the EMS rays.
ConeContext build_context(const Scenario& scn, const Pose& pose);

struct ConeOptions {
  double dtheta = deg2rad(0.1);
  bool refine = true;
  Exec exec = Exec::Parallel;
};

// Planar angles of the omega = 0 edge rays of cone{v, ems...}.
std::vector<double> sector_edges(const PlanarTwist& v, const std::vector<PlanarTwist>& ems);

MotionCone naive_motion_cone(const ConeContext& ctx, const ConeOptions& opt = {});
MotionCone naive_motion_cone(const Scenario& scn, const Pose& pose,
                             const ConeOptions& opt = {});

struct Decomposition {
  double alpha = 0.0;
  double theta = 0.0;
  std::vector<double> betas;
  PlanarTwist v_w = PlanarTwist::Zero();      // EMS part
  PlanarTwist v_h_neg = PlanarTwist::Zero();  // WMS part, alpha * wms_twist(theta)
};

// v_g = v_w + v_h_neg for a pure gripper translation v_g. Throws OutsideCone or
// NoUniqueDecomposition.
Decomposition decompose(const ConeContext& ctx, const PlanarTwist& v_g);
Decomposition decompose(const Scenario& scn, const Pose& pose, const PlanarTwist& v_g);

// Cone spanned by the arc end twists and the EMS rays only.
MotionCone linear_cone_approx(const ConeContext& ctx);
MotionCone linear_cone_approx(const Scenario& scn, const Pose& pose);

inline PlanarTwist direction_twist(double Theta) {
  return {std::cos(Theta), std::sin(Theta), 0.0};
}

}  // namespace conemech
