#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "conemech/geometry.hpp"

namespace conemech {

struct ObjectModel {
  double mass = 0.0;
  Eigen::Vector2d com = Eigen::Vector2d::Zero();           // object frame
  Eigen::Vector2d grasp_center = Eigen::Vector2d::Zero();  // object frame
  std::vector<Eigen::Vector2d> contact_points;             // object frame
  std::vector<std::string> labels;
};

struct ContactSpec {
  int point_index = 0;
  Eigen::Vector2d normal{0.0, 1.0};  // world frame, pointing into the object
  double mu_e = 0.0;
  bool cc = false;  // EMS rotation sense, counterclockwise when true
  int sl = 0;       // 0 sticking, +1/-1 slip along +t/-t with t = (n_y, -n_x)
};

struct Pose {
  double x = 0.0;  // grasp center, world
  double y = 0.0;
  double phi = 0.0;
};

struct Scenario {
  ObjectModel object;
  std::vector<ContactSpec> contacts;
  double mu_g = 0.4;
  double N_g = 20.0;
  double patch_radius = 0.01;
  double gravity = 9.81;
  Pose pose;
  // Contact whose cc flag fixes the rotation sense of two-contact modes.
  int pivot = 0;

  LimitSurface limit_surface() const {
    return LimitSurface::from_patch_radius(mu_g, N_g, patch_radius);
  }
};

enum class ContactMode {
  SingleSticking,  // 2 wrench rays, 1 EMS ray
  SingleSliding,   // 1 wrench ray, 2 EMS rays
  TwoSliding,      // 2 wrench rays, 1 EMS ray
};

const char* contact_mode_name(ContactMode m);

// Structural checks (unit normals, indices, mass, friction); throws InvalidInput.
void validate_scenario(const Scenario& scn);
// Throws UnsupportedMode outside the catalog.
ContactMode classify_mode(const Scenario& scn);

Eigen::Matrix2d rotation(double phi);
// Object-frame point to its offset from the grasp center in the gripper frame.
Eigen::Vector2d to_gripper(const Scenario& scn, double phi, const Eigen::Vector2d& q_obj);
Eigen::Vector2d to_object(const Scenario& scn, double phi, const Eigen::Vector2d& r_grip);
Eigen::Vector2d contact_offset(const Scenario& scn, const Pose& pose, size_t k);

Eigen::Vector2d contact_tangent(const Eigen::Vector2d& n);

// Forces on the object, as wrenches about the grasp center.
PlanarWrench gravity_wrench(const Scenario& scn, const Pose& pose);
std::vector<PlanarWrench> contact_wrench_rays(const Scenario& scn, const Pose& pose);

// Object twist with zero velocity at the point p (relative to the grasp center).
PlanarTwist rotation_about(const Eigen::Vector2d& p, double omega);

// Rotational rays have |omega| = 1, translational rays unit speed.
std::vector<PlanarTwist> ems_rays(const Scenario& scn, const Pose& pose);

// Velocity of contact k's material point under object twist v.
Eigen::Vector2d contact_velocity(const Scenario& scn, const Pose& pose, size_t k,
                                 const PlanarTwist& v);

// Instantaneous rotation center (relative to the grasp center) of a twist with
// nonzero omega.
Eigen::Vector2d instant_center(const PlanarTwist& v);

}  // namespace conemech
