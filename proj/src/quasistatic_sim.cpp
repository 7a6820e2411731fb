#include "conemech/quasistatic_sim.hpp"

#include <fmt/format.h>
#include <exception>
#include <optional>

namespace conemech {

const char* step_status_name(StepStatus s) {
  switch (s) {
    case StepStatus::Maintained: return "maintained";
    case StepStatus::Slipped: return "slipped";
    case StepStatus::Separated: return "separated";
    case StepStatus::Unresolved: return "unresolved";
  }
  return "?";
}

Scenario apply_perturbation(const Scenario& scn, const PerturbationSpec& p) {
  Scenario out = scn;
  for (const auto& [path, off] : p.offsets) param_ref(out, path) += off;
  validate_scenario(out);
  return out;
}

namespace {

constexpr double kSeparating = 1e-9;

std::optional<Decomposition> try_decompose(const Scenario& scn, const Pose& pose,
                                           const PlanarTwist& u) {
  try {
    return decompose(build_context(scn, pose), u);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Scenario only_contact(const Scenario& scn, size_t k) {
  Scenario s = scn;
  s.contacts = {scn.contacts[k]};
  s.pivot = 0;
  return s;
}

std::string contact_label(const Scenario& scn, size_t k) {
  const int idx = scn.contacts[k].point_index;
  if (idx < static_cast<int>(scn.object.labels.size()) && !scn.object.labels[idx].empty()) {
    return scn.object.labels[idx];
  }
  return fmt::format("#{}", k);
}

struct Candidate {
  Decomposition d;
  double slip_rate = 0.0;
  std::string label;
};

// Alternative single-contact modes for scn's only contact, excluding desired.
std::vector<Candidate> single_contact_candidates(const Scenario& scn, const Pose& pose,
                                                 const PlanarTwist& u, bool any_mode) {
  const ContactSpec& want = scn.contacts[0];
  std::vector<Candidate> out;
  const auto consider = [&](int sl, bool cc) {
    if (!any_mode && sl == want.sl && cc == want.cc) return;
    Scenario s = scn;
    s.contacts[0].sl = sl;
    s.contacts[0].cc = cc;
    const auto d = try_decompose(s, pose, u);
    if (!d) return;
    Candidate c{*d, 0.0, ""};
    if (want.sl == 0 && sl != 0) c.slip_rate = std::abs(d->betas.back());
    c.label = sl == 0 ? fmt::format("sticking cc={}", cc)
                      : fmt::format("sliding sl={:+d} cc={}", sl, cc);
    out.push_back(std::move(c));
  };
  if (want.sl != 0) consider(-want.sl, want.cc);
  for (int sl : {1, -1}) {
    consider(sl, want.cc);
    consider(sl, !want.cc);
  }
  consider(0, want.cc);
  return out;
}

const Candidate* least_slip(const std::vector<Candidate>& c) {
  const Candidate* best = nullptr;
  for (const auto& x : c) {
    if (!best || x.slip_rate < best->slip_rate) best = &x;
  }
  return best;
}

StepResolution from_candidate(const Candidate& c, StepStatus status, int separated,
                              const std::string& where) {
  StepResolution r;
  r.status = status;
  r.v_w = c.d.v_w;
  r.v_h_neg = c.d.v_h_neg;
  r.slip_rate = c.slip_rate;
  r.separated_contact = separated;
  r.label = fmt::format("{} at {}", c.label, where);
  return r;
}

}  // namespace

StepResolution resolve_step(const Scenario& scn, const Pose& pose, double Theta) {
  const PlanarTwist u = direction_twist(Theta);
  if (const auto d = try_decompose(scn, pose, u)) {
    StepResolution r;
    r.status = StepStatus::Maintained;
    r.v_w = d->v_w;
    r.v_h_neg = d->v_h_neg;
    r.label = "desired mode";
    return r;
  }

  if (scn.contacts.size() == 1) {
    const auto cands = single_contact_candidates(scn, pose, u, false);
    if (const Candidate* c = least_slip(cands)) {
      return from_candidate(*c, StepStatus::Slipped, -1, contact_label(scn, 0));
    }
  } else {
    // Both contacts kept, sliding the other way round.
    Scenario rev = scn;
    for (auto& c : rev.contacts) c.sl = -c.sl;
    rev.contacts[rev.pivot].cc = !rev.contacts[rev.pivot].cc;
    if (const auto d = try_decompose(rev, pose, u)) {
      return from_candidate({*d, 0.0, "reversed sliding"}, StepStatus::Slipped, -1, "both");
    }
    std::vector<Candidate> cands;
    std::vector<int> other;
    for (size_t keep = 0; keep < scn.contacts.size(); ++keep) {
      const size_t gone = 1 - keep;
      const Scenario s = only_contact(scn, keep);
      for (auto& c : single_contact_candidates(s, pose, u, true)) {
        const double vn =
            contact_velocity(scn, pose, gone, c.d.v_w).dot(scn.contacts[gone].normal);
        if (vn > kSeparating) {
          c.label += fmt::format(" at {}, {} separates", contact_label(scn, keep),
                                 contact_label(scn, gone));
          cands.push_back(std::move(c));
          other.push_back(static_cast<int>(gone));
        }
      }
    }
    if (const Candidate* c = least_slip(cands)) {
      StepResolution r = from_candidate(*c, StepStatus::Separated, other[c - cands.data()], "");
      r.label = c->label;
      return r;
    }
  }

  bool all_leave = true;
  for (const auto& c : scn.contacts) all_leave = all_leave && u.head<2>().dot(c.normal) > kSeparating;
  StepResolution r;
  if (all_leave) {
    r.status = StepStatus::Separated;
    r.v_w = u;
    r.separated_contact = -2;
    r.label = "free motion, every contact separates";
  } else {
    r.label = "no consistent contact mode";
  }
  return r;
}

RolloutReport rollout(const Trajectory& plan, const Scenario& true_scn) {
  validate_scenario(true_scn);
  if (true_scn.contacts.size() != plan.contact_count || classify_mode(true_scn) != plan.mode) {
    throw Error(ErrorKind::ModeCatalogMismatch,
                "true scenario and plan use different contact modes");
  }
  RolloutReport rep;
  Scenario s = true_scn;
  Pose pose = plan.initial_pose;
  Eigen::Vector2d grasp = true_scn.object.grasp_center;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    s.object.grasp_center = grasp;
    const StepResolution r = resolve_step(s, pose, step.Theta);
    rep.statuses.push_back(r.status);
    rep.labels.push_back(r.label);
    if (r.status == StepStatus::Unresolved) {
      rep.success = false;
      if (rep.failure_step == 0) rep.failure_step = static_cast<int>(i + 1);
      break;
    }
    rep.slip += r.slip_rate * step.step_len;
    std::tie(pose, grasp) = apply_motion(pose, grasp, r.v_w, r.v_h_neg, step.step_len);
    if (r.status == StepStatus::Separated) {
      rep.separated = true;
      rep.success = false;
      if (rep.failure_step == 0) rep.failure_step = static_cast<int>(i + 1);
      if (r.separated_contact < 0 || s.contacts.size() == 1) break;
      s = only_contact(s, 1 - r.separated_contact);
    }
  }
  if (rep.slip >= kNegligibleSlip) rep.success = false;
  rep.final_pose = pose;
  rep.final_grasp = grasp;
  return rep;
}

std::vector<PerturbationSpec> grid_cells(const std::vector<SweepAxis>& axes) {
  std::vector<PerturbationSpec> cells{PerturbationSpec{}};
  for (const auto& ax : axes) {
    std::vector<PerturbationSpec> next;
    for (const auto& c : cells) {
      for (double off : ax.offsets) {
        PerturbationSpec p = c;
        p.offsets.emplace_back(ax.path, off);
        next.push_back(std::move(p));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

int SweepTable::robust_negligible() const {
  int n = 0;
  for (const auto& c : cells) n += !c.robust.separated && c.robust.slip <= ne_threshold;
  return n;
}

int SweepTable::naive_above(double slip) const {
  int n = 0;
  for (const auto& c : cells) n += c.naive.slip > slip;
  return n;
}

int SweepTable::robust_dominates() const {
  int n = 0;
  for (const auto& c : cells) n += c.robust.slip <= c.naive.slip;
  return n;
}

SweepTable perturbation_sweep(const Scenario& nominal, const ParameterBox& box,
                              const PlanFactory& factory,
                              const std::vector<PerturbationSpec>& grid, Exec exec) {
  if (grid.empty()) throw Error(ErrorKind::InvalidInput, "perturbation grid is empty");
  SweepTable t;
  t.robust_plan = factory(nominal, box);
  t.naive_plan = factory(nominal, ParameterBox{});
  const long n = static_cast<long>(grid.size());
  std::vector<Scenario> truth;
  truth.reserve(n);
  for (const auto& p : grid) truth.push_back(apply_perturbation(nominal, p));
  t.cells.resize(n);
  std::vector<std::exception_ptr> errs(n);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (long i = 0; i < n; ++i) {
    try {
      t.cells[i].perturbation = grid[i];
      t.cells[i].naive = rollout(t.naive_plan, truth[i]);
      t.cells[i].robust = rollout(t.robust_plan, truth[i]);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
  return t;
}

}  // namespace conemech
