#include <gtest/gtest.h>

#include <random>
#include <tuple>

#include "common.hpp"

using namespace conemech;
using conemech::testing::bundled;
using conemech::testing::grid_hausdorff;
using conemech::testing::random_peg;

namespace {

Scenario at_phi(Scenario s, double deg) {
  s.pose.phi = deg2rad(deg);
  return s;
}

// Plans with a fixed gripper direction; negative when that direction leaves
// the cone along the way.
double constant_direction_slip(const ScenarioFile& f, double goal, double Theta) {
  Scenario s = f.scenario;
  Pose p = s.pose;
  Eigen::Vector2d g = s.object.grasp_center;
  double slip = 0;
  for (int n = 0; std::abs(p.phi - goal) >= deg2rad(0.5); ++n) {
    if (n >= 500) return -1;
    s.object.grasp_center = g;
    try {
      if (!robust_cone(s, p, f.box).contains(Theta)) return -1;
      const Decomposition d = decompose(s, p, direction_twist(Theta));
      if (d.v_w.z() * (goal - p.phi) <= 0) return -1;
      const double L =
          std::min(0.005, std::min(deg2rad(1), std::abs(p.phi - goal)) / std::abs(d.v_w.z()));
      std::tie(p, g) = apply_motion(p, g, d.v_w, d.v_h_neg, L);
      slip += d.alpha * L;
    } catch (const Error&) {
      return -1;
    }
  }
  return slip;
}

}  // namespace

TEST(ParamPaths, ResolveAndReject) {
  Scenario s = bundled("fig6").scenario;
  EXPECT_EQ(param_value(s, "object.mass_kg"), s.object.mass);
  EXPECT_EQ(param_value(s, "object.com_m.y"), s.object.com.y());
  EXPECT_EQ(param_value(s, "object.contacts[1].point_m.y"), s.object.contact_points[1].y());
  EXPECT_EQ(param_value(s, "surfaces.mu[1]"), 0.1);
  param_ref(s, "gripper.mu_g") = 0.5;
  EXPECT_EQ(s.mu_g, 0.5);
  for (const char* bad : {"object.mass", "object.com_m.z", "surfaces.mu[2]",
                          "object.contacts[5].point_m.x", ""}) {
    EXPECT_THROW(param_value(s, bad), Error) << bad;
  }
}

TEST(ParamPaths, VertexMask) {
  const Scenario s = bundled("fig3").scenario;
  ParameterBox box{{{"object.grasp_m.x", 0.001}, {"object.mass_kg", 0.01}}};
  const Scenario v = vertex_scenario(s, box, 0b01);
  EXPECT_DOUBLE_EQ(v.object.grasp_center.x(), s.object.grasp_center.x() + 0.001);
  EXPECT_DOUBLE_EQ(v.object.mass, s.object.mass - 0.01);
}

TEST(RobustCone, ZeroBoxEqualsNaive) {
  for (const char* name : {"fig3", "fig5", "fig6"}) {
    ScenarioFile f = bundled(name);
    ParameterBox zero = f.box;
    for (auto& e : zero.entries) e.delta = 0;
    const MotionCone naive = naive_motion_cone(f.scenario, f.scenario.pose);
    EXPECT_EQ(robust_cone(f.scenario, f.scenario.pose, zero).angles, naive.angles) << name;
    EXPECT_EQ(robust_cone(f.scenario, f.scenario.pose, ParameterBox{}).angles, naive.angles);
  }
}

TEST(RobustCone, CornerStrictlyInsideNaive) {
  const ScenarioFile f = bundled("fig6");
  const MotionCone naive = naive_motion_cone(f.scenario, f.scenario.pose);
  const MotionCone robust = robust_cone(f.scenario, f.scenario.pose, f.box);
  ASSERT_FALSE(robust.empty());
  EXPECT_EQ(robust.angles.intersect(naive.angles), robust.angles);
  EXPECT_LT(robust.angles.measure(), naive.angles.measure());
}

TEST(RobustCone, MatchesDenseGridAndVertexCones) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<std::pair<std::string, double>> pool = {
      {"object.grasp_m.x", 0.003}, {"object.grasp_m.y", 0.003}, {"object.com_m.x", 0.004},
      {"object.com_m.y", 0.004},   {"object.mass_kg", 0.005},   {"surfaces.mu[0]", 0.03}};
  int boxes = 0;
  for (int attempt = 0; boxes < 20 && attempt < 200; ++attempt) {
    const Scenario s = random_peg(rng);
    ParameterBox box;
    for (const auto& [path, scale] : pool) {
      if (u(rng) < 0.5) box.entries.push_back({path, scale * u(rng)});
    }
    if (box.size() < 2) continue;
    const RobustConeResult rc = robust_cone_detail(s, s.pose, box);
    if (!rc.infeasible_vertices.empty() || rc.cone.empty()) continue;
    ++boxes;
    const int n = static_cast<int>(box.size());
    int cells = 1;
    for (int i = 0; i < n; ++i) cells *= 3;
    AngleSet grid = AngleSet::full();
    bool grid_ok = true;
    for (int c = 0; c < cells; ++c) {
      Scenario v = s;
      for (int i = 0, k = c; i < n; ++i, k /= 3) {
        param_ref(v, box.entries[i].path) += (k % 3 - 1) * box.entries[i].delta;
      }
      try {
        grid = grid.intersect(naive_motion_cone(v, v.pose).angles);
      } catch (const Error&) {
        grid_ok = false;
      }
    }
    ASSERT_TRUE(grid_ok);
    EXPECT_LT(grid_hausdorff(rc.cone.angles, grid, deg2rad(0.02)), deg2rad(0.1));
    for (unsigned m = 0; m < (1u << n); ++m) {
      const Scenario v = vertex_scenario(s, box, m);
      const AngleSet vc = naive_motion_cone(v, v.pose).angles;
      EXPECT_EQ(rc.cone.angles.intersect(vc), rc.cone.angles);
    }
  }
  EXPECT_EQ(boxes, 20);
}

TEST(RobustCone, ReportsInfeasibleVertices) {
  ScenarioFile f = bundled("fig4");
  ParameterBox box{{{"object.grasp_m.x", 0.002}, {"object.com_m.y", 0.002}}};
  try {
    robust_cone(f.scenario, f.scenario.pose, box);
    FAIL();
  } catch (const VertexInfeasibleError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::VertexInfeasible);
    EXPECT_EQ(e.vertices().size(), 4u);
  }
}

TEST(RobustCone, BoxSizeLimit) {
  const Scenario s = bundled("fig3").scenario;
  ParameterBox box;
  for (int i = 0; i < 17; ++i) box.entries.push_back({"object.mass_kg", 0.0});
  EXPECT_THROW(robust_cone(s, s.pose, box), Error);
  box.entries = {{"object.mass_kg", -1.0}};
  EXPECT_THROW(robust_cone(s, s.pose, box), Error);
}

TEST(PlanStep, SmallestAlphaOnFinerGrid) {
  for (const char* name : {"fig3", "fig6", "fig3_mu025"}) {
    const ScenarioFile f = bundled(name);
    const Scenario& s = f.scenario;
    const MotionCone cone = robust_cone(s, s.pose, f.box);
    const StepOptions opt;
    const PlanStep st = plan_step(s, s.pose, cone, opt);
    EXPECT_TRUE(cone.contains(st.Theta));
    EXPECT_GE(st.alpha, 0);
    EXPECT_GE(st.betas[0], 0);

    const ConeContext ctx = build_context(s, s.pose);
    const PlanarTwist& e = ctx.ems[0];
    const auto& iv = ctx.wms.arc.interval;
    double best = 1e300;
    const double fine = opt.dtheta / 10;
    for (long k = 0; iv.lo + k * fine <= iv.hi; ++k) {
      const PlanarTwist v = wms_twist(ctx.wms, iv.lo + k * fine);
      const double r = -v.z() / e.z();
      if (r < 0) continue;
      const Eigen::Vector2d w = v.head<2>() + r * e.head<2>();
      if (cone.contains(std::atan2(w.y(), w.x()))) best = std::min(best, 1 / w.norm());
    }
    EXPECT_LE(st.alpha, best + 1e-6) << name;
  }
}

TEST(PlanStep, CornerFirstStep) {
  const ScenarioFile f = bundled("fig6");
  const PlanStep st = plan_step(f.scenario, f.scenario.pose, f.box);
  EXPECT_GT(st.alpha, 0);
  EXPECT_TRUE(robust_cone(f.scenario, f.scenario.pose, f.box).contains(st.Theta));
  EXPECT_LE(std::abs(st.v_w.z()) * st.step_len, deg2rad(1.0) + 1e-12);
}

TEST(PlanStep, Errors) {
  Scenario s = bundled("fig3").scenario;
  EXPECT_THROW(plan_step(s, s.pose, MotionCone{}), Error);
  s.contacts[0].sl = 1;
  const MotionCone cone{AngleSet::full()};
  try {
    plan_step(s, s.pose, cone);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedMode);
  }
  s.contacts[0].sl = 0;
  try {
    plan_step(s, s.pose, MotionCone{AngleSet::from_interval(2.0, 2.1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoFeasibleSample);
  }
}

TEST(IntegrateStep, NoSlipKeepsGrasp) {
  const Pose p{0.01, 0.02, 0.5};
  const Eigen::Vector2d g(0.05, 0.01);
  const auto [p2, g2] = apply_motion(p, g, PlanarTwist(0.3, -0.1, 2.0), PlanarTwist::Zero(), 0.01);
  EXPECT_EQ(g2, g);
  EXPECT_NEAR(p2.phi, 0.52, 1e-15);
}

TEST(IntegrateStep, PureSlipKeepsObject) {
  const Pose p{0.01, 0.02, 0.5};
  const Eigen::Vector2d g(0.05, 0.01);
  const auto [p2, g2] = apply_motion(p, g, PlanarTwist::Zero(), PlanarTwist(1, 0, 0), 0.002);
  EXPECT_EQ(p2.phi, p.phi);
  // object origin stays put
  const Eigen::Vector2d o1 = Eigen::Vector2d(p.x, p.y) - rotation(p.phi) * g;
  const Eigen::Vector2d o2 = Eigen::Vector2d(p2.x, p2.y) - rotation(p2.phi) * g2;
  EXPECT_LT((o1 - o2).norm(), 1e-15);
  EXPECT_NEAR((g2 - g).norm(), 0.002, 1e-15);
  EXPECT_NEAR(p2.x - p.x, 0.002, 1e-15);
}

TEST(IntegrateStep, CompositionErrorQuadratic) {
  const ScenarioFile f = bundled("fig6");
  PlanStep st = plan_step(f.scenario, f.scenario.pose, f.box);
  const Pose p = f.scenario.pose;
  const Eigen::Vector2d g = f.scenario.object.grasp_center;
  double prev = 0;
  std::vector<double> ratios;
  for (double L : {0.004, 0.002, 0.001, 0.0005}) {
    st.step_len = L;
    const auto [p2, g2] = integrate_step(f.scenario, p, g, st);
    const Eigen::Vector2d moved(p2.x - p.x, p2.y - p.y);
    const double err = (moved - L * direction_twist(st.Theta).head<2>()).norm();
    if (prev > 0) ratios.push_back(prev / err);
    prev = err;
  }
  for (double r : ratios) EXPECT_NEAR(r, 4.0, 0.2);
}

TEST(PlanTrajectory, PegNinetyToSixty) {
  const ScenarioFile f = bundled("fig3_mu025");
  const Trajectory tr = plan_trajectory(f.scenario, f.box, deg2rad(60), f.plan_options());
  EXPECT_LT(std::abs(tr.final_pose.phi - deg2rad(60)), deg2rad(0.5));
  EXPECT_GT(tr.steps.size(), 0u);
}

TEST(PlanTrajectory, CornerReachesGoal) {
  const ScenarioFile f = bundled("fig6");
  const Trajectory tr = plan_trajectory(f.scenario, f.box, deg2rad(85), f.plan_options());
  EXPECT_LE(tr.steps.size(), 200u);
  EXPECT_LT(std::abs(tr.final_pose.phi - deg2rad(85)), deg2rad(0.5));
  EXPECT_EQ(tr.mode, ContactMode::TwoSliding);

  // chained states, and every direction inside the cone recomputed there
  Pose pose = tr.initial_pose;
  Eigen::Vector2d grasp = tr.initial_grasp;
  double slip = 0, path = 0;
  for (const PlanStep& st : tr.steps) {
    EXPECT_EQ(st.pose_before.phi, pose.phi);
    EXPECT_EQ(st.pose_before.x, pose.x);
    EXPECT_EQ(st.grasp_before, grasp);
    pose = st.pose_after;
    grasp = st.grasp_after;
    slip += st.alpha * st.step_len;
    path += st.step_len;
  }
  for (size_t i = 0; i < tr.steps.size(); i += 5) {
    const PlanStep& st = tr.steps[i];
    Scenario s = f.scenario;
    s.object.grasp_center = st.grasp_before;
    EXPECT_TRUE(robust_cone(s, st.pose_before, f.box).contains(st.Theta)) << i;
  }
  EXPECT_EQ(tr.final_pose.phi, pose.phi);
  EXPECT_DOUBLE_EQ(tr.cumulative_slip, slip);
  EXPECT_DOUBLE_EQ(tr.path_length, path);
}

TEST(PlanTrajectory, CornerFromZeroFailsAtFirstStep) {
  const ScenarioFile f = bundled("fig6_phi0");
  try {
    plan_trajectory(f.scenario, f.box, deg2rad(85), f.plan_options());
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.failed_step(), 1u);
    EXPECT_TRUE(e.kind() == ErrorKind::VertexInfeasible || e.kind() == ErrorKind::EmptyRobustCone);
    EXPECT_FALSE(e.vertices().empty());
    EXPECT_NE(std::string(e.what()).find("phi=0.000"), std::string::npos);
  }
}

TEST(PlanTrajectory, Deterministic) {
  const ScenarioFile f = bundled("fig6");
  const Trajectory a = plan_trajectory(f.scenario, f.box, deg2rad(85), f.plan_options());
  const Trajectory b = plan_trajectory(f.scenario, f.box, deg2rad(85), f.plan_options());
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].Theta, b.steps[i].Theta);
    EXPECT_EQ(a.steps[i].pose_after.phi, b.steps[i].pose_after.phi);
    EXPECT_EQ(a.steps[i].grasp_after, b.steps[i].grasp_after);
  }
  EXPECT_EQ(a.cumulative_slip, b.cumulative_slip);
}

TEST(PlanTrajectory, ZeroBoxIsNaivePlan) {
  const ScenarioFile f = bundled("fig3");
  ParameterBox zero = f.box;
  for (auto& e : zero.entries) e.delta = 0;
  const double goal = deg2rad(*f.planner.phi_goal_deg);
  const Trajectory a = plan_trajectory(f.scenario, zero, goal, f.plan_options());
  const Trajectory b = plan_trajectory(f.scenario, ParameterBox{}, goal, f.plan_options());
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].Theta, b.steps[i].Theta);
    EXPECT_EQ(a.steps[i].alpha, b.steps[i].alpha);
    EXPECT_EQ(a.steps[i].pose_after.phi, b.steps[i].pose_after.phi);
  }
  EXPECT_EQ(a.cumulative_slip, b.cumulative_slip);
}

TEST(PlanTrajectory, StepLimit) {
  const ScenarioFile f = bundled("fig6");
  PlanOptions opt = f.plan_options();
  opt.max_steps = 3;
  try {
    plan_trajectory(f.scenario, f.box, deg2rad(85), opt);
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepLimitExceeded);
    EXPECT_EQ(e.partial().steps.size(), 3u);
  }
}

TEST(PlanTrajectory, WrongSenseRejected) {
  const ScenarioFile f = bundled("fig6");
  try {
    plan_trajectory(f.scenario, f.box, deg2rad(10), f.plan_options());
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.failed_step(), 1u);
  }
}

TEST(PlanTrajectory, BeatsEveryConstantDirection) {
  for (const char* name : {"fig3", "table1"}) {
    const ScenarioFile f = bundled(name);
    const double goal = deg2rad(*f.planner.phi_goal_deg);
    const Trajectory tr = plan_trajectory(f.scenario, f.box, goal, f.plan_options());
    int feasible = 0;
    for (double deg = -180; deg < 180; deg += 0.5) {
      const double slip = constant_direction_slip(f, goal, deg2rad(deg));
      if (slip < 0) continue;
      ++feasible;
      EXPECT_LE(tr.cumulative_slip, slip + 1e-12) << name << " " << deg;
    }
    EXPECT_GT(feasible, 0) << name;
  }
}

TEST(PlanTrajectory, CornerStartsNear38) {
  const ScenarioFile f = bundled("fig6");
  const Trajectory tr =
      plan_trajectory(at_phi(f.scenario, 38), f.box, deg2rad(85), f.plan_options());
  EXPECT_LT(std::abs(tr.final_pose.phi - deg2rad(85)), deg2rad(0.5));
}

TEST(PlanStep, ThetaRangeModuloTurn) {
  const ScenarioFile f = bundled("fig3");
  const Scenario& s = f.scenario;
  const MotionCone cone = naive_motion_cone(s, s.pose);
  StepOptions a, b;
  a.theta_range = AngleInterval{deg2rad(150), deg2rad(270)};
  b.theta_range = AngleInterval{deg2rad(150 - 360), deg2rad(270 - 360)};
  const PlanStep x = plan_step(s, s.pose, cone, a), y = plan_step(s, s.pose, cone, b);
  EXPECT_NEAR(x.Theta, y.Theta, 1e-9);
  EXPECT_NEAR(x.alpha, y.alpha, 1e-9);
  StepOptions c;
  c.theta_range = AngleInterval{deg2rad(10), deg2rad(20)};
  EXPECT_THROW(plan_step(s, s.pose, cone, c), Error);
}
