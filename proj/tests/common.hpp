#pragma once

#include <random>
#include <string>

#include "conemech/scenario_io.hpp"

namespace conemech::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(CONEMECH_SCENARIO_DIR) + "/" + name + ".scn";
}

inline ScenarioFile bundled(const std::string& name) { return load_scenario(scenario_path(name)); }

inline Scenario sticking_peg() {
  Scenario s;
  s.object.mass = 0.085;
  s.object.com = {0.16, 0.051};
  s.object.grasp_center = {0.06, 0.01};
  s.object.contact_points = {{0.0, 0.0}};
  s.object.labels = {"A"};
  ContactSpec c;
  c.normal = {0.0, 1.0};
  c.mu_e = 0.25;
  s.contacts = {c};
  s.pose.phi = deg2rad(70);
  return s;
}

// Single-contact scenario drawn around the peg geometry; retries until the
// gravity wrench lies inside the limit surface.
inline Scenario random_peg(std::mt19937& rng, int sl = 0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Scenario s = sticking_peg();
    s.object.mass = 0.03 + 0.15 * u(rng);
    s.object.grasp_center = {0.03 + 0.06 * u(rng), -0.01 + 0.04 * u(rng)};
    s.object.com = s.object.grasp_center + Eigen::Vector2d(0.02 + 0.1 * u(rng), 0.05 * u(rng));
    s.contacts[0].mu_e = 0.1 + 0.5 * u(rng);
    s.contacts[0].sl = sl;
    s.contacts[0].cc = u(rng) < 0.3;
    s.mu_g = 0.3 + 0.3 * u(rng);
    s.N_g = 15 + 10 * u(rng);
    s.pose.phi = deg2rad(30 + 80 * u(rng));
    const PlanarWrench G = gravity_wrench(s, s.pose);
    if (s.limit_surface().quadratic_form(G) < 0.8) return s;
  }
}

// Membership on a fixed grid, skipping points within skip of a boundary.
template <class F>
int grid_disagreements(const AngleSet& s, F&& oracle, double step, double skip = 1e-9) {
  int bad = 0;
  const int n = static_cast<int>(std::round(kTwoPi / step));
  for (int i = 0; i < n; ++i) {
    const double a = -kPi + i * step;
    bool near = false;
    for (const auto& p : s.pieces()) {
      near = near || std::abs(wrap_angle(a - p.lo)) < skip || std::abs(wrap_angle(a - p.hi)) < skip;
    }
    if (near) continue;
    if (s.contains(a) != oracle(a)) ++bad;
  }
  return bad;
}

// Hausdorff distance between two angle sets, measured on a grid.
inline double grid_hausdorff(const AngleSet& a, const AngleSet& b, double step = deg2rad(0.01)) {
  double d = 0;
  const int n = static_cast<int>(std::round(kTwoPi / step));
  for (int i = 0; i < n; ++i) {
    const double x = -kPi + i * step;
    if (a.contains(x)) d = std::max(d, angular_distance(b, x));
    if (b.contains(x)) d = std::max(d, angular_distance(a, x));
  }
  return d;
}

}  // namespace conemech::testing
