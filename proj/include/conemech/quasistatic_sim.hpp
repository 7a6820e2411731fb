#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "conemech/robust_planner.hpp"

namespace conemech {

inline constexpr double kNegligibleSlip = 2e-4;  // m

enum class StepStatus { Maintained, Slipped, Separated, Unresolved };
const char* step_status_name(StepStatus s);

struct PerturbationSpec {
  std::vector<std::pair<std::string, double>> offsets;
};

Scenario apply_perturbation(const Scenario& scn, const PerturbationSpec& p);

struct StepResolution {
  StepStatus status = StepStatus::Unresolved;
  PlanarTwist v_w = PlanarTwist::Zero();      // per unit gripper travel
  PlanarTwist v_h_neg = PlanarTwist::Zero();
  double slip_rate = 0.0;  // tangential speed at contacts meant to stick
  int separated_contact = -1;  // -1 none, -2 every contact
  std::string label;
};

// Resolves one commanded gripper direction against scn's desired mode, then
// the alternatives in fixed order: opposite sliding, sliding +1, sliding -1 and
// sticking on each kept contact, separation of a contact, free motion.
StepResolution resolve_step(const Scenario& scn, const Pose& pose, double Theta);

struct RolloutReport {
  std::vector<StepStatus> statuses;
  std::vector<std::string> labels;
  double slip = 0.0;  // m, cumulative contact slip
  bool separated = false;
  bool success = true;
  int failure_step = 0;  // 1-based, 0 when none
  Pose final_pose;
  Eigen::Vector2d final_grasp = Eigen::Vector2d::Zero();
};

// Replays the plan's gripper steps against true_scn. Throws ModeCatalogMismatch.
RolloutReport rollout(const Trajectory& plan, const Scenario& true_scn);

struct SweepAxis {
  std::string path;
  std::vector<double> offsets;
};

// Cartesian product; the first axis varies slowest.
std::vector<PerturbationSpec> grid_cells(const std::vector<SweepAxis>& axes);

using PlanFactory = std::function<Trajectory(const Scenario&, const ParameterBox&)>;

struct SweepCell {
  PerturbationSpec perturbation;
  RolloutReport naive;
  RolloutReport robust;
};

struct SweepTable {
  Trajectory naive_plan;
  Trajectory robust_plan;
  std::vector<SweepCell> cells;
  double ne_threshold = kNegligibleSlip;

  int robust_negligible() const;
  int naive_above(double slip) const;
  int robust_dominates() const;
};

// Plans once with box and once with an empty box, then rolls both plans out in
// every grid cell.
SweepTable perturbation_sweep(const Scenario& nominal, const ParameterBox& box,
                              const PlanFactory& factory,
                              const std::vector<PerturbationSpec>& grid,
                              Exec exec = Exec::Parallel);

}  // namespace conemech
