#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conemech/error.hpp"
#include "conemech/motion_cone.hpp"

namespace conemech {

struct BoxEntry {
  std::string path;
  double delta = 0.0;  // half-width, in the field's file units (SI)
};

struct ParameterBox {
  std::vector<BoxEntry> entries;
  size_t size() const { return entries.size(); }
};

inline constexpr size_t kMaxBoxEntries = 16;

// Resolves a dotted path such as "object.grasp_m.x" or
// "object.contacts[1].point_m.y"; throws InvalidInput for unknown paths.
double& param_ref(Scenario& scn, const std::string& path);
double param_value(const Scenario& scn, const std::string& path);

// Bit i of mask selects +delta (set) or -delta (clear) for entry i.
Scenario vertex_scenario(const Scenario& scn, const ParameterBox& box, unsigned mask);

struct RobustConeResult {
  MotionCone cone;
  std::vector<unsigned> infeasible_vertices;
  std::vector<std::string> vertex_errors;
};

RobustConeResult robust_cone_detail(const Scenario& scn, const Pose& pose,
                                    const ParameterBox& box, const ConeOptions& opt = {});
// Throws VertexInfeasibleError if any vertex cone is empty or invalid.
MotionCone robust_cone(const Scenario& scn, const Pose& pose, const ParameterBox& box,
                       const ConeOptions& opt = {});

struct PlanStep {
  double Theta = 0.0;
  double step_len = 0.0;
  double alpha = 0.0;  // per unit gripper travel
  double theta = 0.0;
  std::vector<double> betas;
  PlanarTwist v_w = PlanarTwist::Zero();      // object world twist per unit travel
  PlanarTwist v_h_neg = PlanarTwist::Zero();  // in-hand motion per unit travel
  Pose pose_before;
  Eigen::Vector2d grasp_before = Eigen::Vector2d::Zero();
  Pose pose_after;
  Eigen::Vector2d grasp_after = Eigen::Vector2d::Zero();
};

struct StepOptions {
  std::optional<AngleInterval> theta_range;  // default: whole arc
  double dtheta = deg2rad(0.5);
  double max_step = 0.005;
  double max_dphi = deg2rad(1.0);
  Exec exec = Exec::Parallel;
};

// Smallest-alpha candidate whose direction lies in cone. The step length is
// max_step capped so that |dphi| <= max_dphi. Pose and grasp fields are left
// for integrate_step.
PlanStep plan_step(const Scenario& scn, const Pose& pose, const MotionCone& cone,
                   const StepOptions& opt = {});
PlanStep plan_step(const Scenario& scn, const Pose& pose, const ParameterBox& box,
                   const StepOptions& opt = {}, const ConeOptions& cone_opt = {});

// Applies object world twist v_w and in-hand motion v_h_neg over gripper
// travel len. The world rotation is exact about the twist's rotation center.
std::pair<Pose, Eigen::Vector2d> apply_motion(const Pose& pose, const Eigen::Vector2d& grasp,
                                              const PlanarTwist& v_w,
                                              const PlanarTwist& v_h_neg, double len);

std::pair<Pose, Eigen::Vector2d> integrate_step(const Scenario& scn, const Pose& pose,
                                                const Eigen::Vector2d& grasp,
                                                const PlanStep& step);

struct PlanOptions {
  StepOptions step;
  ConeOptions cone;
  double goal_tol = deg2rad(0.5);
  int max_steps = 500;
};

struct Trajectory {
  std::vector<PlanStep> steps;
  Pose initial_pose;
  Pose final_pose;
  Eigen::Vector2d initial_grasp = Eigen::Vector2d::Zero();
  Eigen::Vector2d final_grasp = Eigen::Vector2d::Zero();
  double cumulative_slip = 0.0;  // in-hand, m
  double path_length = 0.0;      // gripper, m
  ContactMode mode = ContactMode::SingleSticking;
  size_t contact_count = 0;
};

class PlanningError : public Error {
 public:
  PlanningError(ErrorKind kind, const std::string& what, double phi, Trajectory partial,
                std::vector<unsigned> vertices = {});
  double phi() const { return phi_; }
  const Trajectory& partial() const { return partial_; }
  // 1-based index of the step that could not be planned.
  size_t failed_step() const { return partial_.steps.size() + 1; }
  const std::vector<unsigned>& vertices() const { return vertices_; }

 private:
  double phi_;
  Trajectory partial_;
  std::vector<unsigned> vertices_;
};

// Receding-horizon loop: robust cone, plan_step, integrate_step until
// |phi - phi_goal| < goal_tol. An empty box gives the naive planner.
Trajectory plan_trajectory(const Scenario& scn, const ParameterBox& box, double phi_goal,
                           const PlanOptions& opt = {});

}  // namespace conemech
