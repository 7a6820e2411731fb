#include "conemech/robust_planner.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <regex>
#include <tuple>

namespace conemech {

namespace {

double& axis_of(Eigen::Vector2d& v, const std::string& axis, const std::string& path) {
  if (axis == "x") return v.x();
  if (axis == "y") return v.y();
  throw Error(ErrorKind::InvalidInput, fmt::format("unknown parameter path '{}'", path));
}

}  // namespace

double& param_ref(Scenario& scn, const std::string& path) {
  static const std::regex point_re(R"(object\.(com_m|grasp_m)\.(x|y))");
  static const std::regex contact_re(R"(object\.contacts\[(\d+)\]\.point_m\.(x|y))");
  static const std::regex mu_re(R"(surfaces\.mu\[(\d+)\])");
  const auto unknown = [&]() {
    return Error(ErrorKind::InvalidInput, fmt::format("unknown parameter path '{}'", path));
  };
  std::smatch m;
  if (path == "object.mass_kg") return scn.object.mass;
  if (path == "gripper.mu_g") return scn.mu_g;
  if (path == "gripper.grasp_force_N") return scn.N_g;
  if (path == "gripper.patch_radius_m") return scn.patch_radius;
  if (path == "gripper.gravity_mps2") return scn.gravity;
  if (std::regex_match(path, m, point_re)) {
    auto& v = m[1] == "com_m" ? scn.object.com : scn.object.grasp_center;
    return axis_of(v, m[2], path);
  }
  if (std::regex_match(path, m, contact_re)) {
    const size_t k = std::stoul(m[1]);
    if (k >= scn.contacts.size()) throw unknown();
    const int idx = scn.contacts[k].point_index;
    if (idx < 0 || idx >= static_cast<int>(scn.object.contact_points.size())) throw unknown();
    return axis_of(scn.object.contact_points[idx], m[2], path);
  }
  if (std::regex_match(path, m, mu_re)) {
    const size_t k = std::stoul(m[1]);
    if (k >= scn.contacts.size()) throw unknown();
    return scn.contacts[k].mu_e;
  }
  throw unknown();
}

double param_value(const Scenario& scn, const std::string& path) {
  Scenario copy = scn;
  return param_ref(copy, path);
}

Scenario vertex_scenario(const Scenario& scn, const ParameterBox& box, unsigned mask) {
  Scenario v = scn;
  for (size_t i = 0; i < box.entries.size(); ++i) {
    const double s = (mask >> i) & 1u ? 1.0 : -1.0;
    param_ref(v, box.entries[i].path) += s * box.entries[i].delta;
  }
  return v;
}

RobustConeResult robust_cone_detail(const Scenario& scn, const Pose& pose,
                                    const ParameterBox& box, const ConeOptions& opt) {
  if (box.size() > kMaxBoxEntries) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("{} uncertain parameters exceed the limit of {}", box.size(),
                            kMaxBoxEntries));
  }
  for (const auto& e : box.entries) {
    if (!(e.delta >= 0) || !std::isfinite(e.delta)) {
      throw Error(ErrorKind::InvalidInput, fmt::format("delta for '{}' must be >= 0", e.path));
    }
    (void)param_value(scn, e.path);
  }
  const long n = 1L << box.size();
  std::vector<MotionCone> cones(n);
  std::vector<std::string> errs(n);
  ConeOptions inner = opt;
  inner.exec = Exec::Serial;
#pragma omp parallel for schedule(dynamic) if (opt.exec == Exec::Parallel)
  for (long v = 0; v < n; ++v) {
    try {
      cones[v] = naive_motion_cone(vertex_scenario(scn, box, static_cast<unsigned>(v)), pose,
                                   n == 1 ? opt : inner);
      if (cones[v].empty()) errs[v] = "empty motion cone";
    } catch (const Error& e) {
      errs[v] = fmt::format("{}: {}", error_kind_name(e.kind()), e.what());
    }
  }
  RobustConeResult out;
  out.cone = cones[0];
  for (long v = 0; v < n; ++v) {
    if (!errs[v].empty()) {
      out.infeasible_vertices.push_back(static_cast<unsigned>(v));
      out.vertex_errors.push_back(errs[v]);
    }
    if (v > 0) out.cone.angles = out.cone.angles.intersect(cones[v].angles);
  }
  if (!out.infeasible_vertices.empty()) out.cone = MotionCone{};
  return out;
}

MotionCone robust_cone(const Scenario& scn, const Pose& pose, const ParameterBox& box,
                       const ConeOptions& opt) {
  RobustConeResult r = robust_cone_detail(scn, pose, box, opt);
  if (!r.infeasible_vertices.empty()) {
    throw VertexInfeasibleError(
        fmt::format("{} of {} box vertices have no feasible motion ({})",
                    r.infeasible_vertices.size(), 1u << box.size(), r.vertex_errors.front()),
        r.infeasible_vertices);
  }
  return r.cone;
}

PlanStep plan_step(const Scenario& scn, const Pose& pose, const MotionCone& cone,
                   const StepOptions& opt) {
  if (!(opt.dtheta > 0) || !(opt.max_step > 0) || !(opt.max_dphi > 0)) {
    throw Error(ErrorKind::InvalidInput, "dtheta, step length and dphi cap must be > 0");
  }
  if (cone.empty()) throw Error(ErrorKind::EmptyRobustCone, "robust motion cone is empty");
  const ConeContext ctx = build_context(scn, pose);
  if (ctx.ems.size() != 1) {
    throw Error(ErrorKind::UnsupportedMode,
                fmt::format("planning needs a one-ray EMS, mode {} has {}",
                            contact_mode_name(ctx.mode), ctx.ems.size()));
  }
  const PlanarTwist& e = ctx.ems[0];
  double lo = ctx.wms.arc.interval.lo, hi = ctx.wms.arc.interval.hi;
  if (opt.theta_range) {
    const double shift =
        kTwoPi * std::round((0.5 * (lo + hi) - 0.5 * (opt.theta_range->lo + opt.theta_range->hi)) /
                            kTwoPi);
    lo = std::max(lo, opt.theta_range->lo + shift);
    hi = std::min(hi, opt.theta_range->hi + shift);
  }
  if (hi < lo) throw Error(ErrorKind::NoFeasibleSample, "theta range misses the arc");
  std::vector<double> th;
  for (long k = 0; lo + k * opt.dtheta <= hi; ++k) th.push_back(lo + k * opt.dtheta);
  if (hi - th.back() > 1e-12) th.push_back(hi);

  struct Cand {
    bool ok = false;
    double alpha = 0, beta = 0, Theta = 0;
    PlanarTwist v;
  };
  const auto eval = [&](double t) {
    Cand c;
    const PlanarTwist v = wms_twist(ctx.wms, t);
    const double r = -v.z() / e.z();
    if (r < 0) return c;
    const Eigen::Vector2d w = v.head<2>() + r * e.head<2>();
    const double wn = w.norm();
    if (!(wn > 0)) return c;
    const double Theta = std::atan2(w.y(), w.x());
    if (!cone.contains(Theta)) return c;
    return Cand{true, 1.0 / wn, r / wn, Theta, v};
  };
  const long n = static_cast<long>(th.size());
  std::vector<Cand> cand(n);
#pragma omp parallel for schedule(static) if (opt.exec == Exec::Parallel)
  for (long i = 0; i < n; ++i) cand[i] = eval(th[i]);
  long best = -1;
  for (long i = 0; i < n; ++i) {
    if (cand[i].ok && (best < 0 || cand[i].alpha < cand[best].alpha)) best = i;
  }
  if (best < 0) {
    throw Error(ErrorKind::NoFeasibleSample, "no sampled theta lands inside the robust cone");
  }

  // Local refinement between the neighbouring samples: clip to the feasible
  // part, then golden-section on alpha.
  Cand c = cand[best];
  double theta = th[best];
  const auto edge = [&](double in, double out) {
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (in + out);
      (eval(mid).ok ? in : out) = mid;
    }
    return in;
  };
  double a = best > 0 ? th[best - 1] : th[best];
  double b = best + 1 < n ? th[best + 1] : th[best];
  if (!cand[std::max(best - 1, 0L)].ok) a = edge(th[best], a);
  if (!cand[std::min(best + 1, n - 1)].ok) b = edge(th[best], b);
  const auto cost = [&](double t) {
    const Cand k = eval(t);
    return k.ok ? k.alpha : std::numeric_limits<double>::infinity();
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = cost(x1), f2 = cost(x2);
  for (int k = 0; k < 80 && b - a > 1e-13; ++k) {
    if (f1 <= f2) {
      b = x2, x2 = x1, f2 = f1, x1 = b - gr * (b - a), f1 = cost(x1);
    } else {
      a = x1, x1 = x2, f1 = f2, x2 = a + gr * (b - a), f2 = cost(x2);
    }
  }
  for (double t : {a, b, x1, x2}) {
    const Cand k = eval(t);
    if (k.ok && k.alpha < c.alpha) c = k, theta = t;
  }

  PlanStep s;
  s.Theta = c.Theta;
  s.alpha = c.alpha;
  s.theta = theta;
  s.betas = {c.beta};
  s.v_w = c.beta * e;
  s.v_h_neg = c.alpha * c.v;
  const double rate = std::abs(s.v_w.z());
  s.step_len = rate > 0 ? std::min(opt.max_step, opt.max_dphi / rate) : opt.max_step;
  s.pose_before = pose;
  s.grasp_before = scn.object.grasp_center;
  return s;
}

PlanStep plan_step(const Scenario& scn, const Pose& pose, const ParameterBox& box,
                   const StepOptions& opt, const ConeOptions& cone_opt) {
  return plan_step(scn, pose, robust_cone(scn, pose, box, cone_opt), opt);
}

std::pair<Pose, Eigen::Vector2d> apply_motion(const Pose& pose, const Eigen::Vector2d& grasp,
                                              const PlanarTwist& v_w,
                                              const PlanarTwist& v_h_neg, double len) {
  const Eigen::Vector2d here(pose.x, pose.y);
  const Eigen::Matrix2d R = rotation(pose.phi);
  const Eigen::Vector2d origin = here - R * grasp;
  const double dphi = v_w.z() * len;
  Eigen::Vector2d origin2;
  if (v_w.z() != 0) {
    const Eigen::Vector2d ic = here + instant_center(v_w);
    origin2 = ic + rotation(dphi) * (origin - ic);
  } else {
    origin2 = origin + v_w.head<2>() * len;
  }
  Pose out;
  out.phi = pose.phi + dphi;
  const Eigen::Vector2d grasp2 = grasp + R.transpose() * v_h_neg.head<2>() * len;
  const Eigen::Vector2d here2 = origin2 + rotation(out.phi) * grasp2;
  out.x = here2.x();
  out.y = here2.y();
  return {out, grasp2};
}

std::pair<Pose, Eigen::Vector2d> integrate_step(const Scenario&, const Pose& pose,
                                                const Eigen::Vector2d& grasp,
                                                const PlanStep& step) {
  return apply_motion(pose, grasp, step.v_w, step.v_h_neg, step.step_len);
}

PlanningError::PlanningError(ErrorKind kind, const std::string& what, double phi,
                             Trajectory partial, std::vector<unsigned> vertices)
    : Error(kind, what), phi_(phi), partial_(std::move(partial)),
      vertices_(std::move(vertices)) {}

Trajectory plan_trajectory(const Scenario& scn, const ParameterBox& box, double phi_goal,
                           const PlanOptions& opt) {
  validate_scenario(scn);
  Trajectory tr;
  tr.mode = classify_mode(scn);
  tr.contact_count = scn.contacts.size();
  tr.initial_pose = scn.pose;
  tr.initial_grasp = scn.object.grasp_center;
  Scenario s = scn;
  Pose pose = scn.pose;
  Eigen::Vector2d grasp = scn.object.grasp_center;

  const auto finish = [&]() {
    tr.final_pose = pose;
    tr.final_grasp = grasp;
  };
  const auto fail = [&](ErrorKind kind, const std::string& why,
                        std::vector<unsigned> vertices = {}) {
    finish();
    throw PlanningError(kind,
                        fmt::format("step {} at phi={:.3f} deg: {}", tr.steps.size() + 1,
                                    rad2deg(pose.phi), why),
                        pose.phi, tr, std::move(vertices));
  };

  while (std::abs(phi_goal - pose.phi) >= opt.goal_tol) {
    if (static_cast<int>(tr.steps.size()) >= opt.max_steps) {
      fail(ErrorKind::StepLimitExceeded, fmt::format("step limit {} reached", opt.max_steps));
    }
    s.object.grasp_center = grasp;
    s.pose = pose;
    const RobustConeResult rc = robust_cone_detail(s, pose, box, opt.cone);
    if (!rc.infeasible_vertices.empty()) {
      fail(box.size() == 0 ? ErrorKind::EmptyRobustCone : ErrorKind::VertexInfeasible,
           fmt::format("{} of {} vertex cones empty or invalid ({})",
                       rc.infeasible_vertices.size(), 1u << box.size(),
                       rc.vertex_errors.front()),
           rc.infeasible_vertices);
    }
    if (rc.cone.empty()) fail(ErrorKind::EmptyRobustCone, "robust motion cone is empty");
    StepOptions so = opt.step;
    so.max_dphi = std::min(so.max_dphi, std::abs(phi_goal - pose.phi));
    PlanStep step;
    try {
      step = plan_step(s, pose, rc.cone, so);
    } catch (const PlanningError&) {
      throw;
    } catch (const Error& e) {
      fail(e.kind(), e.what());
    }
    if (step.v_w.z() * (phi_goal - pose.phi) < 0) {
      fail(ErrorKind::InvalidInput, "EMS rotation sense moves away from the goal");
    }
    std::tie(step.pose_after, step.grasp_after) = integrate_step(s, pose, grasp, step);
    pose = step.pose_after;
    grasp = step.grasp_after;
    tr.cumulative_slip += step.alpha * step.step_len;
    tr.path_length += step.step_len;
    tr.steps.push_back(std::move(step));
  }
  finish();
  return tr;
}

}  // namespace conemech
