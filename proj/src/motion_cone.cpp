#include "conemech/motion_cone.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "conemech/error.hpp"

namespace conemech {

namespace {

constexpr double kOmegaZero = 1e-12;
constexpr double kRootClamp = 1e-7;
constexpr double kNonneg = -1e-10;
constexpr double kResidual = 1e-8;

PlanarTwist normalize_twist(const PlanarTwist& v) {
  const double t = v.head<2>().norm();
  if (t > 0) return v / t;
  return v / std::abs(v.z());
}

// Smallest closed arc containing all rays; width 2*pi when they positively
// span the plane. Returns false for an empty input.
bool ray_hull(std::vector<double> angles, double& lo, double& width) {
  if (angles.empty()) return false;
  for (double& a : angles) a = wrap_angle(a);
  std::sort(angles.begin(), angles.end());
  const size_t n = angles.size();
  double best_gap = -1.0;
  size_t best = 0;
  for (size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? angles[i + 1] : angles[0] + kTwoPi;
    const double gap = next - angles[i];
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  if (best_gap < kPi) {
    lo = -kPi;
    width = kTwoPi;
    return true;
  }
  lo = best + 1 < n ? angles[best + 1] : angles[0];
  width = kTwoPi - best_gap;
  return true;
}

std::vector<double> edges_of(const std::vector<PlanarTwist>& gens) {
  std::vector<double> out;
  for (size_t i = 0; i < gens.size(); ++i) {
    for (size_t j = i + 1; j < gens.size(); ++j) {
      const PlanarTwist& a = gens[i];
      const PlanarTwist& b = gens[j];
      if (std::abs(a.z()) <= kOmegaZero || std::abs(b.z()) <= kOmegaZero) continue;
      if (a.z() * b.z() >= 0) continue;
      const PlanarTwist w = std::abs(b.z()) * a + std::abs(a.z()) * b;
      if (w.head<2>().norm() == 0) continue;
      out.push_back(std::atan2(w.y(), w.x()));
    }
  }
  for (const auto& g : gens) {
    if (std::abs(g.z()) <= kOmegaZero && g.head<2>().norm() > 0) {
      out.push_back(std::atan2(g.y(), g.x()));
    }
  }
  return out;
}

std::vector<double> arc_samples(const EllipseArc& arc, double dtheta) {
  const double lo = arc.interval.lo, hi = arc.interval.hi;
  if (arc.is_point() || hi <= lo) return {lo};
  std::vector<double> th;
  const auto n = static_cast<long>(std::floor((hi - lo) / dtheta));
  th.reserve(n + 4);
  for (long k = 0; k <= n; ++k) th.push_back(lo + k * dtheta);
  if (hi - th.back() > 1e-12) th.push_back(hi);
  // Sign changes of the WMS rotation rate bound the cone, so hit them exactly.
  const double P = arc.m.z(), Q = arc.a.z(), R = arc.b.z();
  const double rho = std::hypot(Q, R);
  if (rho > 0 && std::abs(P) <= rho) {
    const double psi = std::atan2(R, Q);
    const double half = std::acos(std::clamp(-P / rho, -1.0, 1.0));
    for (double r : {psi + half, psi - half}) {
      for (int j = -2; j <= 2; ++j) {
        const double x = r + j * kTwoPi;
        if (x > lo && x < hi) th.push_back(x);
      }
    }
  }
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  return th;
}

struct Sample {
  bool ok = false;
  double lo = 0.0;
  double width = 0.0;
  bool single = false;
};

Sample eval_sample(const WrenchMotionSet& wms, const std::vector<PlanarTwist>& ems,
                   double theta) {
  std::vector<PlanarTwist> gens{wms_twist(wms, theta)};
  gens.insert(gens.end(), ems.begin(), ems.end());
  const auto e = edges_of(gens);
  Sample s;
  s.ok = ray_hull(e, s.lo, s.width);
  s.single = e.size() == 1;
  return s;
}

double unwrap_near(double a, double ref) { return ref + wrap_angle(a - ref); }

// Golden-section search for the extreme edge angle on [a, b].
double refine_extremum(const WrenchMotionSet& wms, const std::vector<PlanarTwist>& ems,
                       double a, double b, double ref, bool maximize) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double th) {
    const Sample s = eval_sample(wms, ems, th);
    if (!s.ok) return maximize ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
    const double u = unwrap_near(s.lo, ref);
    return maximize ? u : -u;
  };
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
    if (f1 > f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    }
  }
  const double best = std::max(f1, f2);
  return maximize ? best : -best;
}

}  // namespace

PlanarTwist wms_twist(const WrenchMotionSet& wms, double theta) {
  if (!wms.arc.in_interval(theta, 1e-9)) {
    throw Error(ErrorKind::ThetaOutOfArc, "theta outside the arc interval");
  }
  return normalize_twist(wms.arc.at(theta).cwiseQuotient(wms.tau));
}

ConeContext build_context(const Scenario& scn, const Pose& pose) {
  validate_scenario(scn);
  ConeContext ctx;
  ctx.mode = classify_mode(scn);
  ctx.gravity = gravity_wrench(scn, pose);
  ctx.contact_rays = contact_wrench_rays(scn, pose);
  WrenchWedge wedge;
  wedge.apex = -ctx.gravity;
  for (const auto& w : ctx.contact_rays) wedge.rays.push_back(-w);
  const LimitSurface ls = scn.limit_surface();
  ctx.wms.arc = intersect_wedge_ellipsoid(ls, wedge);
  ctx.wms.tau = ls.tau();
  ctx.ems = ems_rays(scn, pose);
  return ctx;
}

std::vector<double> sector_edges(const PlanarTwist& v, const std::vector<PlanarTwist>& ems) {
  std::vector<PlanarTwist> gens{v};
  gens.insert(gens.end(), ems.begin(), ems.end());
  return edges_of(gens);
}

MotionCone naive_motion_cone(const ConeContext& ctx, const ConeOptions& opt) {
  if (!(opt.dtheta > 0)) throw Error(ErrorKind::InvalidInput, "dtheta must be > 0");
  const std::vector<double> th = arc_samples(ctx.wms.arc, opt.dtheta);
  const long n = static_cast<long>(th.size());
  std::vector<Sample> samples(n);
#pragma omp parallel for schedule(static) if (opt.exec == Exec::Parallel)
  for (long i = 0; i < n; ++i) samples[i] = eval_sample(ctx.wms, ctx.ems, th[i]);

  const bool can_refine = opt.refine && ctx.ems.size() == 1 && !ctx.wms.arc.is_point();
  AngleSet out;
  long i = 0;
  while (i < n) {
    if (!samples[i].ok) {
      ++i;
      continue;
    }
    long j = i;
    double ref = samples[i].lo;
    double lo = ref, hi = ref + samples[i].width;
    bool full = samples[i].width >= kTwoPi;
    std::vector<double> u{ref};
    for (j = i + 1; j < n && samples[j].ok; ++j) {
      ref = unwrap_near(samples[j].lo, ref);
      u.push_back(ref);
      lo = std::min(lo, ref);
      hi = std::max(hi, ref + samples[j].width);
      full = full || samples[j].width >= kTwoPi;
    }
    if (can_refine) {
      for (long k = i + 1; k + 1 < j; ++k) {
        const size_t q = k - i;
        const bool singles = samples[k - 1].single && samples[k].single && samples[k + 1].single;
        if (!singles) continue;
        if (u[q] > u[q - 1] && u[q] >= u[q + 1]) {
          hi = std::max(hi, refine_extremum(ctx.wms, ctx.ems, th[k - 1], th[k + 1], u[q], true));
        } else if (u[q] < u[q - 1] && u[q] <= u[q + 1]) {
          lo = std::min(lo, refine_extremum(ctx.wms, ctx.ems, th[k - 1], th[k + 1], u[q], false));
        }
      }
    }
    out = out.unite(full ? AngleSet::full() : AngleSet::from_interval(lo, hi));
    i = j;
  }
  return MotionCone{out};
}

MotionCone naive_motion_cone(const Scenario& scn, const Pose& pose, const ConeOptions& opt) {
  return naive_motion_cone(build_context(scn, pose), opt);
}

Decomposition decompose(const ConeContext& ctx, const PlanarTwist& v_g) {
  const double speed = v_g.head<2>().norm();
  if (!(speed > 0) || std::abs(v_g.z()) > 1e-12 * speed) {
    throw Error(ErrorKind::InvalidInput, "gripper motion must be a nonzero translation");
  }
  const Eigen::Vector3d u(v_g.x() / speed, v_g.y() / speed, 0.0);
  const EllipseArc& arc = ctx.wms.arc;
  Decomposition best;
  bool found = false;

  if (ctx.ems.size() == 2) {
    const PlanarTwist v = wms_twist(ctx.wms, arc.interval.lo);
    Eigen::Matrix3d M;
    M << v, ctx.ems[0], ctx.ems[1];
    const double scale = v.norm() * ctx.ems[0].norm() * ctx.ems[1].norm();
    if (std::abs(M.determinant()) < 1e-12 * scale) {
      throw Error(ErrorKind::NoUniqueDecomposition, "WMS and EMS rays are coplanar");
    }
    const Eigen::Vector3d x = M.partialPivLu().solve(u);
    if (x.minCoeff() < kNonneg || (M * x - u).norm() >= kResidual) {
      throw Error(ErrorKind::OutsideCone, "direction outside the motion cone");
    }
    best.alpha = x(0);
    best.theta = arc.interval.lo;
    best.betas = {x(1), x(2)};
    found = true;
  } else {
    const PlanarTwist& e = ctx.ems[0];
    const Eigen::Vector3d k = e.cross(u);
    const Eigen::Vector3d& tau = ctx.wms.tau;
    std::vector<double> roots;
    if (arc.is_point()) {
      roots.push_back(arc.interval.lo);
    } else {
      const double P = arc.m.cwiseQuotient(tau).dot(k);
      const double Q = arc.a.cwiseQuotient(tau).dot(k);
      const double R = arc.b.cwiseQuotient(tau).dot(k);
      const double rho = std::hypot(Q, R);
      const double mag = arc.m.cwiseQuotient(tau).norm() * k.norm();
      if (rho <= 1e-14 * mag && std::abs(P) <= 1e-14 * mag) {
        throw Error(ErrorKind::NoUniqueDecomposition, "every arc twist fits the direction");
      }
      if (rho > 0 && std::abs(P) <= rho * (1 + 1e-9)) {
        const double psi = std::atan2(R, Q);
        const double half = std::acos(std::clamp(-P / rho, -1.0, 1.0));
        for (double r : {psi - half, psi + half}) {
          for (int j = -2; j <= 2; ++j) {
            const double x = r + j * kTwoPi;
            if (arc.in_interval(x, kRootClamp)) {
              roots.push_back(std::clamp(x, arc.interval.lo, arc.interval.hi));
            }
          }
        }
      }
    }
    for (double th : roots) {
      const PlanarTwist v = wms_twist(ctx.wms, th);
      Eigen::Matrix<double, 3, 2> M;
      M << v, e;
      const Eigen::Vector2d x = M.colPivHouseholderQr().solve(u);
      if (x.minCoeff() < kNonneg || (M * x - u).norm() >= kResidual) continue;
      if (!found || x(0) < best.alpha) {
        best.alpha = x(0);
        best.theta = th;
        best.betas = {x(1)};
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::OutsideCone, "direction outside the motion cone");
  }

  const PlanarTwist v = wms_twist(ctx.wms, best.theta);
  best.alpha *= speed;
  for (double& b : best.betas) b *= speed;
  best.v_h_neg = best.alpha * v;
  best.v_w = PlanarTwist::Zero();
  for (size_t i = 0; i < best.betas.size(); ++i) best.v_w += best.betas[i] * ctx.ems[i];
  return best;
}

Decomposition decompose(const Scenario& scn, const Pose& pose, const PlanarTwist& v_g) {
  return decompose(build_context(scn, pose), v_g);
}

MotionCone linear_cone_approx(const ConeContext& ctx) {
  const EllipseArc& arc = ctx.wms.arc;
  std::vector<PlanarTwist> gens{wms_twist(ctx.wms, arc.interval.lo)};
  if (!arc.is_point() && arc.interval.hi > arc.interval.lo) {
    gens.push_back(wms_twist(ctx.wms, arc.interval.hi));
  }
  gens.insert(gens.end(), ctx.ems.begin(), ctx.ems.end());
  double lo = 0, width = 0;
  if (!ray_hull(edges_of(gens), lo, width)) return {};
  if (width >= kTwoPi) return MotionCone{AngleSet::full()};
  return MotionCone{AngleSet::from_interval(lo, lo + width)};
}

MotionCone linear_cone_approx(const Scenario& scn, const Pose& pose) {
  return linear_cone_approx(build_context(scn, pose));
}

}  // namespace conemech
