#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conemech/quasistatic_sim.hpp"

namespace conemech {

// Boundary values keep the file's units (degrees); scenario holds SI/radians.
struct PlannerConfig {
  std::optional<double> phi_goal_deg;
  double dtheta_deg = 0.5;
  double max_dphi_deg = 1.0;
  double max_step_m = 0.005;
  int max_steps = 500;
  double goal_tol_deg = 0.5;
  std::optional<std::pair<double, double>> theta_range_deg;
};

struct ScenarioFile {
  Scenario scenario;
  double phi_deg = 0.0;
  std::optional<std::string> pivot;
  ParameterBox box;
  PlannerConfig planner;
  std::vector<SweepAxis> sweep;

  PlanOptions plan_options(Exec exec = Exec::Parallel) const;
  bool operator==(const ScenarioFile& o) const;
};

// Throws ParseError with the 1-based line of the offending node.
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioFile& f);

// Fixed-point rendering with 9 significant digits, no exponent.
std::string format_sig9(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_sweep_csv(std::ostream& os, const SweepTable& t, const std::vector<SweepAxis>& axes,
                     const ParameterBox& box);

// A cell is outside the box when some offset exceeds that path's half-width.
bool outside_box(const PerturbationSpec& p, const ParameterBox& box);

}  // namespace conemech
