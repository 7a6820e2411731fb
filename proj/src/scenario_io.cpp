#include "conemech/scenario_io.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>
#include <yaml-cpp/yaml.h>

namespace conemech {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  const int line = line_of(n);
  throw ParseError(line > 0 ? fmt::format("line {}: {}", line, msg) : msg, line);
}

void expect_map(const YAML::Node& n, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(n, fmt::format("'{}' must be a mapping", where));
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in '{}'", key, where));
  }
}

YAML::Node need(const YAML::Node& n, const std::string& key, const std::string& where) {
  const YAML::Node v = n[key];
  if (!v) fail(n, fmt::format("missing key '{}' in '{}'", key, where));
  return v;
}

double num(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, fmt::format("'{}' must be a number", what));
  double v = 0;
  try {
    v = n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, fmt::format("'{}' must be a number, got '{}'", what, n.Scalar()));
  }
  if (!std::isfinite(v)) fail(n, fmt::format("'{}' must be finite", what));
  return v;
}

int integer(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, fmt::format("'{}' must be an integer", what));
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    fail(n, fmt::format("'{}' must be an integer, got '{}'", what, n.Scalar()));
  }
}

bool boolean(const YAML::Node& n, const std::string& what) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    fail(n, fmt::format("'{}' must be true or false", what));
  }
}

Eigen::Vector2d point(const YAML::Node& n, const std::string& what) {
  expect_map(n, what, {"x", "y"});
  return {num(need(n, "x", what), what + ".x"), num(need(n, "y", what), what + ".y")};
}

double positive(const YAML::Node& n, const std::string& what) {
  const double v = num(n, what);
  if (!(v > 0)) fail(n, fmt::format("'{}' must be > 0", what));
  return v;
}

std::string str(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, fmt::format("'{}' must be a string", what));
  return n.Scalar();
}

ScenarioFile from_yaml(const YAML::Node& root) {
  ScenarioFile f;
  if (!root.IsMap()) throw ParseError("scenario file must be a mapping", line_of(root));
  expect_map(root, "<root>",
             {"object", "surfaces", "gripper", "pose", "uncertainty", "planner", "sweep"});
  Scenario& s = f.scenario;

  const YAML::Node obj = need(root, "object", "<root>");
  expect_map(obj, "object", {"mass_kg", "com_m", "grasp_m", "contacts", "pivot"});
  s.object.mass = positive(need(obj, "mass_kg", "object"), "object.mass_kg");
  s.object.com = point(need(obj, "com_m", "object"), "object.com_m");
  s.object.grasp_center = point(need(obj, "grasp_m", "object"), "object.grasp_m");
  const YAML::Node cs = need(obj, "contacts", "object");
  if (!cs.IsSequence() || cs.size() == 0) fail(cs, "'object.contacts' must be a non-empty list");
  for (size_t k = 0; k < cs.size(); ++k) {
    const std::string where = fmt::format("object.contacts[{}]", k);
    const YAML::Node c = cs[k];
    expect_map(c, where, {"name", "point_m", "normal", "sliding", "ccw"});
    ContactSpec spec;
    spec.point_index = static_cast<int>(k);
    s.object.labels.push_back(c["name"] ? str(c["name"], where + ".name") : fmt::format("c{}", k));
    s.object.contact_points.push_back(point(need(c, "point_m", where), where + ".point_m"));
    const YAML::Node nn = need(c, "normal", where);
    spec.normal = point(nn, where + ".normal");
    if (std::abs(spec.normal.norm() - 1.0) > 1e-9) fail(nn, where + ".normal must be a unit vector");
    if (c["sliding"]) {
      spec.sl = integer(c["sliding"], where + ".sliding");
      if (spec.sl < -1 || spec.sl > 1) fail(c["sliding"], where + ".sliding must be -1, 0 or 1");
    }
    if (c["ccw"]) spec.cc = boolean(c["ccw"], where + ".ccw");
    s.contacts.push_back(spec);
  }
  if (obj["pivot"]) {
    const std::string name = str(obj["pivot"], "object.pivot");
    bool found = false;
    for (size_t k = 0; k < s.object.labels.size(); ++k) {
      if (s.object.labels[k] == name) {
        s.pivot = static_cast<int>(k);
        found = true;
      }
    }
    if (!found) fail(obj["pivot"], fmt::format("pivot '{}' names no contact", name));
    f.pivot = name;
  }

  const YAML::Node surf = need(root, "surfaces", "<root>");
  expect_map(surf, "surfaces", {"mu"});
  const YAML::Node mu = need(surf, "mu", "surfaces");
  if (!mu.IsSequence() || mu.size() != s.contacts.size()) {
    fail(mu, "'surfaces.mu' needs one coefficient per contact");
  }
  for (size_t k = 0; k < mu.size(); ++k) {
    const double v = num(mu[k], fmt::format("surfaces.mu[{}]", k));
    if (v < 0) fail(mu[k], "friction coefficients must be >= 0");
    s.contacts[k].mu_e = v;
  }

  const YAML::Node grip = need(root, "gripper", "<root>");
  expect_map(grip, "gripper", {"mu_g", "grasp_force_N", "patch_radius_m", "gravity_mps2"});
  s.mu_g = positive(need(grip, "mu_g", "gripper"), "gripper.mu_g");
  s.N_g = positive(need(grip, "grasp_force_N", "gripper"), "gripper.grasp_force_N");
  s.patch_radius = positive(need(grip, "patch_radius_m", "gripper"), "gripper.patch_radius_m");
  if (grip["gravity_mps2"]) s.gravity = num(grip["gravity_mps2"], "gripper.gravity_mps2");

  const YAML::Node pose = need(root, "pose", "<root>");
  expect_map(pose, "pose", {"phi_deg", "x_m", "y_m"});
  f.phi_deg = num(need(pose, "phi_deg", "pose"), "pose.phi_deg");
  s.pose.phi = deg2rad(f.phi_deg);
  if (pose["x_m"]) s.pose.x = num(pose["x_m"], "pose.x_m");
  if (pose["y_m"]) s.pose.y = num(pose["y_m"], "pose.y_m");

  if (const YAML::Node unc = root["uncertainty"]) {
    if (!unc.IsSequence()) fail(unc, "'uncertainty' must be a list");
    for (size_t i = 0; i < unc.size(); ++i) {
      const std::string where = fmt::format("uncertainty[{}]", i);
      expect_map(unc[i], where, {"path", "delta"});
      BoxEntry e{str(need(unc[i], "path", where), where + ".path"),
                 num(need(unc[i], "delta", where), where + ".delta")};
      if (e.delta < 0) fail(unc[i]["delta"], where + ".delta must be >= 0");
      try {
        (void)param_value(s, e.path);
      } catch (const Error& ex) {
        fail(unc[i]["path"], ex.what());
      }
      f.box.entries.push_back(e);
    }
    if (f.box.size() > kMaxBoxEntries) fail(unc, "at most 16 uncertain parameters are supported");
  }

  if (const YAML::Node pl = root["planner"]) {
    expect_map(pl, "planner", {"phi_goal_deg", "dtheta_deg", "max_dphi_deg", "max_step_m",
                               "max_steps", "goal_tol_deg", "theta_range_deg"});
    PlannerConfig& p = f.planner;
    if (pl["phi_goal_deg"]) p.phi_goal_deg = num(pl["phi_goal_deg"], "planner.phi_goal_deg");
    if (pl["dtheta_deg"]) p.dtheta_deg = positive(pl["dtheta_deg"], "planner.dtheta_deg");
    if (pl["max_dphi_deg"]) p.max_dphi_deg = positive(pl["max_dphi_deg"], "planner.max_dphi_deg");
    if (pl["max_step_m"]) p.max_step_m = positive(pl["max_step_m"], "planner.max_step_m");
    if (pl["max_steps"]) {
      p.max_steps = integer(pl["max_steps"], "planner.max_steps");
      if (p.max_steps < 1) fail(pl["max_steps"], "planner.max_steps must be >= 1");
    }
    if (pl["goal_tol_deg"]) p.goal_tol_deg = positive(pl["goal_tol_deg"], "planner.goal_tol_deg");
    if (const YAML::Node tr = pl["theta_range_deg"]) {
      if (!tr.IsSequence() || tr.size() != 2) fail(tr, "planner.theta_range_deg needs [lo, hi]");
      const double lo = num(tr[0], "planner.theta_range_deg[0]");
      const double hi = num(tr[1], "planner.theta_range_deg[1]");
      if (hi < lo) fail(tr, "planner.theta_range_deg needs lo <= hi");
      p.theta_range_deg = std::make_pair(lo, hi);
    }
  }

  if (const YAML::Node sw = root["sweep"]) {
    expect_map(sw, "sweep", {"axes"});
    const YAML::Node axes = need(sw, "axes", "sweep");
    if (!axes.IsSequence()) fail(axes, "'sweep.axes' must be a list");
    for (size_t i = 0; i < axes.size(); ++i) {
      const std::string where = fmt::format("sweep.axes[{}]", i);
      expect_map(axes[i], where, {"path", "offsets"});
      SweepAxis ax;
      ax.path = str(need(axes[i], "path", where), where + ".path");
      try {
        (void)param_value(s, ax.path);
      } catch (const Error& ex) {
        fail(axes[i]["path"], ex.what());
      }
      const YAML::Node off = need(axes[i], "offsets", where);
      if (!off.IsSequence() || off.size() == 0) fail(off, where + ".offsets must be a non-empty list");
      for (size_t j = 0; j < off.size(); ++j) ax.offsets.push_back(num(off[j], where + ".offsets"));
      f.sweep.push_back(std::move(ax));
    }
  }

  try {
    validate_scenario(s);
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
  return f;
}

std::string g(double v) { return fmt::format("{}", v); }

std::string pt(const Eigen::Vector2d& p) { return fmt::format("{{x: {}, y: {}}}", g(p.x()), g(p.y())); }

}  // namespace

PlanOptions ScenarioFile::plan_options(Exec exec) const {
  PlanOptions o;
  o.step.dtheta = deg2rad(planner.dtheta_deg);
  o.step.max_dphi = deg2rad(planner.max_dphi_deg);
  o.step.max_step = planner.max_step_m;
  o.step.exec = exec;
  if (planner.theta_range_deg) {
    o.step.theta_range = AngleInterval{deg2rad(planner.theta_range_deg->first),
                                       deg2rad(planner.theta_range_deg->second)};
  }
  o.cone.exec = exec;
  o.goal_tol = deg2rad(planner.goal_tol_deg);
  o.max_steps = planner.max_steps;
  return o;
}

bool ScenarioFile::operator==(const ScenarioFile& o) const {
  const Scenario& a = scenario;
  const Scenario& b = o.scenario;
  if (a.object.mass != b.object.mass || a.object.com != b.object.com ||
      a.object.grasp_center != b.object.grasp_center ||
      a.object.contact_points != b.object.contact_points || a.object.labels != b.object.labels ||
      a.contacts.size() != b.contacts.size() || a.mu_g != b.mu_g || a.N_g != b.N_g ||
      a.patch_radius != b.patch_radius || a.gravity != b.gravity || a.pose.x != b.pose.x ||
      a.pose.y != b.pose.y || a.pose.phi != b.pose.phi || a.pivot != b.pivot) {
    return false;
  }
  for (size_t k = 0; k < a.contacts.size(); ++k) {
    const auto& p = a.contacts[k];
    const auto& q = b.contacts[k];
    if (p.point_index != q.point_index || p.normal != q.normal || p.mu_e != q.mu_e ||
        p.cc != q.cc || p.sl != q.sl) {
      return false;
    }
  }
  if (phi_deg != o.phi_deg || pivot != o.pivot || box.size() != o.box.size()) return false;
  for (size_t i = 0; i < box.size(); ++i) {
    if (box.entries[i].path != o.box.entries[i].path ||
        box.entries[i].delta != o.box.entries[i].delta) {
      return false;
    }
  }
  const auto& p = planner;
  const auto& q = o.planner;
  if (p.phi_goal_deg != q.phi_goal_deg || p.dtheta_deg != q.dtheta_deg ||
      p.max_dphi_deg != q.max_dphi_deg || p.max_step_m != q.max_step_m ||
      p.max_steps != q.max_steps || p.goal_tol_deg != q.goal_tol_deg ||
      p.theta_range_deg != q.theta_range_deg || sweep.size() != o.sweep.size()) {
    return false;
  }
  for (size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i].path != o.sweep[i].path || sweep[i].offsets != o.sweep[i].offsets) return false;
  }
  return true;
}

ScenarioFile parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(fmt::format("line {}: {}", e.mark.line + 1, e.msg), e.mark.line + 1);
  }
  return from_yaml(root);
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()), e.line());
  }
}

std::string serialize_scenario(const ScenarioFile& f) {
  const Scenario& s = f.scenario;
  std::string o;
  o += "object:\n";
  o += fmt::format("  mass_kg: {}\n", g(s.object.mass));
  o += fmt::format("  com_m: {}\n", pt(s.object.com));
  o += fmt::format("  grasp_m: {}\n", pt(s.object.grasp_center));
  if (f.pivot) o += fmt::format("  pivot: {}\n", *f.pivot);
  o += "  contacts:\n";
  for (size_t k = 0; k < s.contacts.size(); ++k) {
    const auto& c = s.contacts[k];
    o += fmt::format("    - name: {}\n", s.object.labels[c.point_index]);
    o += fmt::format("      point_m: {}\n", pt(s.object.contact_points[c.point_index]));
    o += fmt::format("      normal: {}\n", pt(c.normal));
    o += fmt::format("      sliding: {}\n", c.sl);
    o += fmt::format("      ccw: {}\n", c.cc ? "true" : "false");
  }
  o += "surfaces:\n  mu: [";
  for (size_t k = 0; k < s.contacts.size(); ++k) {
    o += (k ? ", " : "") + g(s.contacts[k].mu_e);
  }
  o += "]\n";
  o += "gripper:\n";
  o += fmt::format("  mu_g: {}\n  grasp_force_N: {}\n  patch_radius_m: {}\n  gravity_mps2: {}\n",
                   g(s.mu_g), g(s.N_g), g(s.patch_radius), g(s.gravity));
  o += fmt::format("pose:\n  phi_deg: {}\n  x_m: {}\n  y_m: {}\n", g(f.phi_deg), g(s.pose.x),
                   g(s.pose.y));
  if (f.box.size()) {
    o += "uncertainty:\n";
    for (const auto& e : f.box.entries) {
      o += fmt::format("  - {{path: \"{}\", delta: {}}}\n", e.path, g(e.delta));
    }
  }
  const PlannerConfig& p = f.planner;
  o += "planner:\n";
  if (p.phi_goal_deg) o += fmt::format("  phi_goal_deg: {}\n", g(*p.phi_goal_deg));
  o += fmt::format("  dtheta_deg: {}\n  max_dphi_deg: {}\n  max_step_m: {}\n", g(p.dtheta_deg),
                   g(p.max_dphi_deg), g(p.max_step_m));
  o += fmt::format("  max_steps: {}\n  goal_tol_deg: {}\n", p.max_steps, g(p.goal_tol_deg));
  if (p.theta_range_deg) {
    o += fmt::format("  theta_range_deg: [{}, {}]\n", g(p.theta_range_deg->first),
                     g(p.theta_range_deg->second));
  }
  if (!f.sweep.empty()) {
    o += "sweep:\n  axes:\n";
    for (const auto& ax : f.sweep) {
      o += fmt::format("    - path: \"{}\"\n      offsets: [", ax.path);
      for (size_t j = 0; j < ax.offsets.size(); ++j) o += (j ? ", " : "") + g(ax.offsets[j]);
      o += "]\n";
    }
  }
  return o;
}

std::string format_sig9(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "cannot export a non-finite value");
  if (v == 0) return "0";
  const int e = static_cast<int>(std::floor(std::log10(std::abs(v))));
  const int dec = std::clamp(8 - e, 0, 30);
  std::string s = fmt::format("{:.{}f}", v, dec);
  if (s.find_first_not_of("-0.") == std::string::npos) return "0";
  return s;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "step,Theta_deg,step_len_m,phi_deg,grasp_x_m,grasp_y_m,alpha,beta,cum_slip_m\n";
  double slip = 0;
  for (size_t i = 0; i < tr.steps.size(); ++i) {
    const PlanStep& s = tr.steps[i];
    slip += s.alpha * s.step_len;
    os << (i + 1) << ',' << format_sig9(rad2deg(s.Theta)) << ',' << format_sig9(s.step_len) << ','
       << format_sig9(rad2deg(s.pose_after.phi)) << ',' << format_sig9(s.grasp_after.x()) << ','
       << format_sig9(s.grasp_after.y()) << ',' << format_sig9(s.alpha) << ','
       << format_sig9(s.betas.empty() ? 0.0 : s.betas[0]) << ',' << format_sig9(slip) << '\n';
  }
}

bool outside_box(const PerturbationSpec& p, const ParameterBox& box) {
  for (const auto& [path, off] : p.offsets) {
    double delta = 0;
    for (const auto& e : box.entries) {
      if (e.path == path) delta = e.delta;
    }
    if (std::abs(off) > delta * (1 + 1e-12)) return true;
  }
  return false;
}

namespace {

std::string cell_status(const RolloutReport& r, double ne) {
  if (r.statuses.size() && r.statuses.back() == StepStatus::Unresolved) return "UNRESOLVED";
  if (r.separated) return "SEPARATED";
  return r.slip <= ne ? "NE" : "SLIP";
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepTable& t, const std::vector<SweepAxis>& axes,
                     const ParameterBox& box) {
  os << "cell";
  for (const auto& ax : axes) os << ',' << ax.path;
  os << ",naive_slip_m,naive_status,robust_slip_m,robust_status,robust_le_naive,outside_box\n";
  for (size_t i = 0; i < t.cells.size(); ++i) {
    const SweepCell& c = t.cells[i];
    os << (i + 1);
    for (const auto& off : c.perturbation.offsets) os << ',' << format_sig9(off.second);
    os << ',' << format_sig9(c.naive.slip) << ',' << cell_status(c.naive, t.ne_threshold) << ','
       << format_sig9(c.robust.slip) << ',' << cell_status(c.robust, t.ne_threshold) << ','
       << (c.robust.slip <= c.naive.slip ? 1 : 0) << ','
       << (outside_box(c.perturbation, box) ? 1 : 0) << '\n';
  }
}

}  // namespace conemech
