#include "conemech/contact.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>

#include "conemech/error.hpp"

namespace conemech {

const char* contact_mode_name(ContactMode m) {
  switch (m) {
    case ContactMode::SingleSticking: return "single-sticking";
    case ContactMode::SingleSliding: return "single-sliding";
    case ContactMode::TwoSliding: return "two-sliding";
  }
  return "?";
}

void validate_scenario(const Scenario& scn) {
  const auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidInput, m); };
  if (!(scn.object.mass > 0) || !std::isfinite(scn.object.mass)) bad("mass must be > 0");
  if (!scn.object.com.allFinite() || !scn.object.grasp_center.allFinite()) {
    bad("com and grasp center must be finite");
  }
  if (!(scn.gravity >= 0) || !std::isfinite(scn.gravity)) bad("gravity must be >= 0");
  if (scn.contacts.empty()) bad("at least one contact is required");
  for (size_t k = 0; k < scn.contacts.size(); ++k) {
    const auto& c = scn.contacts[k];
    if (c.point_index < 0 ||
        c.point_index >= static_cast<int>(scn.object.contact_points.size())) {
      bad(fmt::format("contact {} references a missing point", k));
    }
    if (!scn.object.contact_points[c.point_index].allFinite()) {
      bad(fmt::format("contact {} point is not finite", k));
    }
    if (std::abs(c.normal.norm() - 1.0) > 1e-9) bad(fmt::format("contact {} normal is not unit", k));
    if (!(c.mu_e >= 0) || !std::isfinite(c.mu_e)) bad(fmt::format("contact {} mu_e must be >= 0", k));
    if (c.sl < -1 || c.sl > 1) bad(fmt::format("contact {} sl must be -1, 0 or 1", k));
  }
  if (scn.pivot < 0 || scn.pivot >= static_cast<int>(scn.contacts.size())) {
    bad("pivot index out of range");
  }
  (void)scn.limit_surface();
}

ContactMode classify_mode(const Scenario& scn) {
  if (scn.contacts.size() == 1) {
    return scn.contacts[0].sl == 0 ? ContactMode::SingleSticking : ContactMode::SingleSliding;
  }
  if (scn.contacts.size() == 2 && scn.contacts[0].sl != 0 && scn.contacts[1].sl != 0) {
    return ContactMode::TwoSliding;
  }
  int rays = 0;
  for (const auto& c : scn.contacts) rays += c.sl == 0 ? 2 : 1;
  throw Error(ErrorKind::UnsupportedMode,
              fmt::format("{} contacts giving {} wrench rays are outside the mode catalog",
                          scn.contacts.size(), rays));
}

Eigen::Matrix2d rotation(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

Eigen::Vector2d to_gripper(const Scenario& scn, double phi, const Eigen::Vector2d& q_obj) {
  return rotation(phi) * (q_obj - scn.object.grasp_center);
}

Eigen::Vector2d to_object(const Scenario& scn, double phi, const Eigen::Vector2d& r_grip) {
  return rotation(phi).transpose() * r_grip + scn.object.grasp_center;
}

Eigen::Vector2d contact_offset(const Scenario& scn, const Pose& pose, size_t k) {
  const auto& c = scn.contacts.at(k);
  return to_gripper(scn, pose.phi, scn.object.contact_points.at(c.point_index));
}

Eigen::Vector2d contact_tangent(const Eigen::Vector2d& n) { return {n.y(), -n.x()}; }

PlanarWrench gravity_wrench(const Scenario& scn, const Pose& pose) {
  const Eigen::Vector2d r = to_gripper(scn, pose.phi, scn.object.com);
  return lift_force(r, {0.0, -scn.object.mass * scn.gravity});
}

std::vector<PlanarWrench> contact_wrench_rays(const Scenario& scn, const Pose& pose) {
  (void)classify_mode(scn);
  std::vector<PlanarWrench> out;
  for (size_t k = 0; k < scn.contacts.size(); ++k) {
    const auto& c = scn.contacts[k];
    const Eigen::Vector2d p = contact_offset(scn, pose, k);
    const Eigen::Vector2d t = contact_tangent(c.normal);
    if (c.sl == 0) {
      out.push_back(lift_force(p, c.normal + c.mu_e * t));
      out.push_back(lift_force(p, c.normal - c.mu_e * t));
    } else {
      out.push_back(lift_force(p, c.normal - c.sl * c.mu_e * t));
    }
  }
  return out;
}

PlanarTwist rotation_about(const Eigen::Vector2d& p, double omega) {
  return {omega * p.y(), -omega * p.x(), omega};
}

Eigen::Vector2d contact_velocity(const Scenario& scn, const Pose& pose, size_t k,
                                 const PlanarTwist& v) {
  const Eigen::Vector2d p = contact_offset(scn, pose, k);
  return {v.x() - v.z() * p.y(), v.y() + v.z() * p.x()};
}

Eigen::Vector2d instant_center(const PlanarTwist& v) {
  return {-v.y() / v.z(), v.x() / v.z()};
}

std::vector<PlanarTwist> ems_rays(const Scenario& scn, const Pose& pose) {
  const ContactMode mode = classify_mode(scn);
  if (mode != ContactMode::TwoSliding) {
    const auto& c = scn.contacts[0];
    const Eigen::Vector2d p = contact_offset(scn, pose, 0);
    const PlanarTwist rot = rotation_about(p, c.cc ? 1.0 : -1.0);
    if (mode == ContactMode::SingleSticking) return {rot};
    const Eigen::Vector2d t = c.sl * contact_tangent(c.normal);
    return {rot, PlanarTwist(t.x(), t.y(), 0.0)};
  }

  Eigen::Matrix<double, 2, 3> A;
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2d& n = scn.contacts[k].normal;
    A.row(k) << n.x(), n.y(), cross2(contact_offset(scn, pose, k), n);
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 1e-9 * std::max(1.0, sv(0)))) {
    throw Error(ErrorKind::UnsupportedMode, "contact normals do not fix a single motion");
  }
  PlanarTwist e = svd.matrixV().col(2);
  if (std::abs(e.z()) < 1e-12) {
    throw Error(ErrorKind::UnsupportedMode, "two-contact mode admits pure translation");
  }
  const double sense = scn.contacts[scn.pivot].cc ? 1.0 : -1.0;
  e /= std::abs(e.z());
  if (e.z() * sense < 0) e = -e;
  for (size_t k = 0; k < 2; ++k) {
    const auto& c = scn.contacts[k];
    const double vt = contact_velocity(scn, pose, k, e).dot(contact_tangent(c.normal));
    if (vt * c.sl < -1e-9 * e.norm()) {
      throw Error(ErrorKind::UnsupportedMode,
                  fmt::format("contact {} would slip against its sliding direction", k));
    }
  }
  return {e};
}

}  // namespace conemech
