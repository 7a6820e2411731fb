#include "conemech/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <ostream>
#include <sstream>

#include "conemech/scenario_io.hpp"

namespace conemech {

namespace {

namespace fs = std::filesystem;

struct Args {
  std::string file;
  bool robust = false;
  bool naive = false;
  bool compare_linear = false;
  bool strict = false;
  std::string out_dir;
  std::optional<double> dtheta_deg;
  std::optional<int> step_cap;
  std::vector<std::string> grid;
};

std::string cone_text(const AngleSet& s) {
  if (s.empty()) return "empty";
  std::string o;
  for (const auto& iv : s.intervals()) {
    if (!o.empty()) o += ' ';
    o += fmt::format("[{:.3f}, {:.3f}]", rad2deg(iv.lo), rad2deg(iv.hi));
  }
  return o;
}

std::string wrench_text(const Eigen::Vector3d& w) {
  return fmt::format("({}, {}, {})", format_sig9(w.x()), format_sig9(w.y()), format_sig9(w.z()));
}

fs::path output_dir(const Args& a) {
  std::string d = a.out_dir;
  if (d.empty()) {
    const char* env = std::getenv("CONEMECH_OUT");
    d = env && *env ? env : ".";
  }
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", p.string()));
  f << text;
}

// Directions over the whole circle that do not keep every contact.
std::string separation_probe(const Scenario& scn, const Pose& pose) {
  int separated = 0, kept = 0;
  const int n = 36;
  for (int i = 0; i < n; ++i) {
    const StepResolution r = resolve_step(scn, pose, deg2rad(10.0 * i));
    if (r.status == StepStatus::Separated) ++separated;
    if (r.status == StepStatus::Maintained || r.status == StepStatus::Slipped) ++kept;
  }
  if (kept == 0 && separated > 0) {
    return fmt::format("separation: a contact must separate ({} of {} probed directions separate, "
                       "none keeps the contacts)",
                       separated, n);
  }
  return fmt::format("probe: {} of {} directions keep the contacts, {} separate", kept, n,
                     separated);
}

int cmd_analyze(const Args& a, std::ostream& out) {
  const ScenarioFile f = load_scenario(a.file);
  const Scenario& s = f.scenario;
  ConeOptions copt;
  if (a.dtheta_deg) copt.dtheta = deg2rad(*a.dtheta_deg);
  const ConeContext ctx = build_context(s, s.pose);
  const MotionCone naive = naive_motion_cone(ctx, copt);
  const EllipseArc& arc = ctx.wms.arc;

  std::ostringstream r;
  r << "scenario: " << a.file << '\n';
  r << "mode: " << contact_mode_name(ctx.mode) << '\n';
  r << "phi_deg: " << format_sig9(f.phi_deg) << '\n';
  r << "gravity_wrench: " << wrench_text(ctx.gravity) << '\n';
  for (size_t i = 0; i < ctx.ems.size(); ++i) r << "ems_ray: " << wrench_text(ctx.ems[i]) << '\n';
  const char* kind = arc.is_point() ? "point" : arc.span() > kPi ? "superior" : "minor";
  r << fmt::format("arc: {} [{:.3f}, {:.3f}] deg, span {:.3f} deg\n", kind,
                   rad2deg(arc.interval.lo), rad2deg(arc.interval.hi), rad2deg(arc.span()));
  r << "naive_cone_deg: " << cone_text(naive.angles) << '\n';
  bool feasible = !naive.empty();
  if (a.robust) {
    const RobustConeResult rc = robust_cone_detail(s, s.pose, f.box, copt);
    r << "robust_cone_deg: " << cone_text(rc.cone.angles) << '\n';
    if (!rc.infeasible_vertices.empty()) {
      r << fmt::format("robust_infeasible_vertices: {} of {}\n", rc.infeasible_vertices.size(),
                       1u << f.box.size());
    }
    feasible = feasible && !rc.cone.empty();
  }
  if (a.compare_linear) {
    const MotionCone lin = linear_cone_approx(ctx);
    r << "linear_cone_deg: " << cone_text(lin.angles) << '\n';
    int extra_up = 0, extra = 0;
    for (int i = 0; i < 3600; ++i) {
      const double th = deg2rad(-180.0 + 0.1 * i);
      if (lin.contains(th) && angular_distance(naive.angles, th) > deg2rad(0.1)) {
        ++extra;
        if (std::sin(th) > 0) ++extra_up;
      }
    }
    if (extra_up > 0 && arc.span() > kPi) {
      r << "linear_check: linear approximation invalid (superior arc): admits positive-y "
           "directions outside the exact cone\n";
    } else if (extra > 0) {
      r << fmt::format("linear_check: linear approximation admits {} extra directions ({} arc)\n",
                       extra, kind);
    } else {
      r << fmt::format("linear_check: linear approximation consistent ({} arc)\n", kind);
    }
  }
  r << "verdict: " << (feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';

  const fs::path dir = output_dir(a);
  write_file(dir / "report.txt", r.str());
  std::ostringstream arc_csv, wms_csv;
  arc_csv << "theta_rad,fx_N,fy_N,mz_Nm,t1,t2\n";
  wms_csv << "theta_rad,vx,vy,omega,cone_deg\n";
  const int n = arc.is_point() ? 1 : 361;
  for (int i = 0; i < n; ++i) {
    const double th = n == 1 ? arc.interval.lo : arc.interval.lo + arc.span() * i / (n - 1);
    const auto w = arc.at(th);
    const auto t = arc.wedge_coords(th);
    arc_csv << format_sig9(th) << ',' << format_sig9(w.x()) << ',' << format_sig9(w.y()) << ','
            << format_sig9(w.z()) << ',' << format_sig9(t.x()) << ',' << format_sig9(t.y()) << '\n';
    const auto v = wms_twist(ctx.wms, th);
    const auto e = sector_edges(v, ctx.ems);
    wms_csv << format_sig9(th) << ',' << format_sig9(v.x()) << ',' << format_sig9(v.y()) << ','
            << format_sig9(v.z()) << ',' << (e.empty() ? std::string() : format_sig9(rad2deg(e[0])))
            << '\n';
  }
  write_file(dir / "arc.csv", arc_csv.str());
  write_file(dir / "wms.csv", wms_csv.str());
  out << r.str();
  return !feasible && a.strict ? 1 : 0;
}

PlanOptions plan_options_for(const ScenarioFile& f, const Args& a) {
  PlanOptions o = f.plan_options();
  if (a.dtheta_deg) o.step.dtheta = deg2rad(*a.dtheta_deg);
  if (a.step_cap) o.max_steps = *a.step_cap;
  return o;
}

double goal_of(const ScenarioFile& f) {
  if (!f.planner.phi_goal_deg) throw ParseError("planner.phi_goal_deg is required for planning", 0);
  return deg2rad(*f.planner.phi_goal_deg);
}

int cmd_plan(const Args& a, std::ostream& out, std::ostream& err) {
  if (a.robust && a.naive) throw ParseError("--robust and --naive are exclusive", 0);
  const ScenarioFile f = load_scenario(a.file);
  const double goal = goal_of(f);
  const PlanOptions opt = plan_options_for(f, a);
  const ParameterBox box = a.naive ? ParameterBox{} : f.box;
  const fs::path dir = output_dir(a);

  Trajectory tr;
  std::string status = "success", reason;
  try {
    tr = plan_trajectory(f.scenario, box, goal, opt);
  } catch (const PlanningError& e) {
    tr = e.partial();
    status = "failed";
    reason = fmt::format("{}: {}", error_kind_name(e.kind()), e.what());
    Scenario at = f.scenario;
    at.object.grasp_center = tr.final_grasp;
    reason += "\n" + separation_probe(at, tr.final_pose);
  }
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  write_file(dir / "trajectory.csv", csv.str());
  std::ostringstream sum;
  sum << "scenario: " << a.file << '\n';
  sum << "planner: " << (a.naive ? "naive" : "robust") << '\n';
  sum << "status: " << status << '\n';
  sum << "steps: " << tr.steps.size() << '\n';
  sum << "start_phi_deg: " << format_sig9(rad2deg(tr.initial_pose.phi)) << '\n';
  sum << "final_phi_deg: " << format_sig9(rad2deg(tr.final_pose.phi)) << '\n';
  sum << "cumulative_slip_m: " << format_sig9(tr.cumulative_slip) << '\n';
  sum << "path_length_m: " << format_sig9(tr.path_length) << '\n';
  if (!reason.empty()) sum << "reason: " << reason << '\n';
  write_file(dir / "plan_summary.txt", sum.str());
  out << sum.str();
  if (status != "success") {
    err << "plan failed " << reason << '\n';
    return a.strict ? 1 : 0;
  }
  return 0;
}

std::vector<SweepAxis> parse_grid(const std::vector<std::string>& specs) {
  std::vector<SweepAxis> axes;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParseError(fmt::format("grid spec '{}' must look like path=o1,o2,...", spec), 0);
    }
    SweepAxis ax;
    ax.path = spec.substr(0, eq);
    std::stringstream ss(spec.substr(eq + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t used = 0;
        ax.offsets.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(fmt::format("bad offset '{}' in grid spec '{}'", tok, spec), 0);
      }
    }
    if (ax.offsets.empty()) throw ParseError(fmt::format("grid spec '{}' has no offsets", spec), 0);
    axes.push_back(std::move(ax));
  }
  return axes;
}

int cmd_sweep(const Args& a, std::ostream& out, std::ostream& err) {
  const ScenarioFile f = load_scenario(a.file);
  const double goal = goal_of(f);
  const PlanOptions opt = plan_options_for(f, a);
  const std::vector<SweepAxis> axes = a.grid.empty() ? f.sweep : parse_grid(a.grid);
  if (axes.empty()) throw ParseError("no sweep grid: add sweep.axes or --grid", 0);
  for (const auto& ax : axes) {
    try {
      (void)param_value(f.scenario, ax.path);
    } catch (const Error& e) {
      throw ParseError(e.what(), 0);
    }
  }
  const PlanFactory factory = [&](const Scenario& s, const ParameterBox& b) {
    return plan_trajectory(s, b, goal, opt);
  };
  SweepTable t;
  try {
    t = perturbation_sweep(f.scenario, f.box, factory, grid_cells(axes));
  } catch (const PlanningError& e) {
    err << "sweep failed: plan " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
    return a.strict ? 1 : 0;
  }
  const fs::path dir = output_dir(a);
  std::ostringstream csv;
  write_sweep_csv(csv, t, axes, f.box);
  write_file(dir / "sweep.csv", csv.str());
  int flagged = 0, flagged_above = 0;
  for (const auto& c : t.cells) {
    if (outside_box(c.perturbation, f.box)) {
      ++flagged;
      flagged_above += c.robust.slip > t.ne_threshold || c.robust.separated;
    }
  }
  const int n = static_cast<int>(t.cells.size());
  std::ostringstream sum;
  sum << "scenario: " << a.file << '\n';
  sum << "cells: " << n << '\n';
  sum << "robust_steps: " << t.robust_plan.steps.size() << '\n';
  sum << "naive_steps: " << t.naive_plan.steps.size() << '\n';
  sum << fmt::format("robust_negligible: {} of {}\n", t.robust_negligible(), n);
  sum << fmt::format("naive_above_1mm: {} of {}\n", t.naive_above(1e-3), n);
  sum << fmt::format("robust_le_naive: {} of {}\n", t.robust_dominates(), n);
  sum << fmt::format("outside_box_cells: {} ({} with robust slip above NE)\n", flagged,
                     flagged_above);
  write_file(dir / "sweep_summary.txt", sum.str());
  out << csv.str() << sum.str();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Motion cones, robust planning and rollouts for in-hand pivoting"};
  app.require_subcommand(1);
  Args a;
  const auto common = [&](CLI::App* sc) {
    sc->add_option("file", a.file, "scenario file")->required();
    sc->add_option("--out", a.out_dir, "output directory (default $CONEMECH_OUT or .)");
    sc->add_option("--dtheta", a.dtheta_deg, "theta spacing in degrees");
    sc->add_flag("--strict", a.strict, "exit 1 on infeasible results");
  };
  CLI::App* analyze = app.add_subcommand("analyze", "arc, motion cones and plot data");
  common(analyze);
  analyze->add_flag("--robust", a.robust, "also intersect over the uncertainty box");
  analyze->add_flag("--compare-linear", a.compare_linear, "compare with the linear approximation");
  CLI::App* plan = app.add_subcommand("plan", "plan a pivoting trajectory");
  common(plan);
  plan->add_flag("--robust", a.robust, "robust planner (default)");
  plan->add_flag("--naive", a.naive, "naive planner, ignores the box");
  plan->add_option("--step-cap", a.step_cap, "maximum planner steps")->check(CLI::PositiveNumber);
  CLI::App* sweep = app.add_subcommand("sweep", "robust vs naive rollouts over a perturbation grid");
  common(sweep);
  sweep->add_option("--grid", a.grid, "path=o1,o2,... (repeatable)");
  sweep->add_option("--step-cap", a.step_cap, "maximum planner steps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }
  try {
    if (*analyze) return cmd_analyze(a, out);
    if (*plan) return cmd_plan(a, out, err);
    return cmd_sweep(a, out, err);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << error_kind_name(e.kind()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace conemech
