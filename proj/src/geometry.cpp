#include "conemech/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "conemech/error.hpp"

namespace conemech {

LimitSurface::LimitSurface(double mu_g, double N_g, double kappa)
    : mu_g_(mu_g), N_g_(N_g), kappa_(kappa) {
  if (!(mu_g > 0 && N_g > 0 && kappa > 0) ||
      !std::isfinite(mu_g * N_g * kappa)) {
    throw Error(ErrorKind::InvalidInput, "limit surface needs mu_g, N_g, kappa > 0");
  }
  const double F = mu_g * N_g;
  tau_ = {F * F, F * F, (kappa * F) * (kappa * F)};
}

LimitSurface LimitSurface::from_patch_radius(double mu_g, double N_g, double r) {
  return LimitSurface(mu_g, N_g, 0.6 * r);
}

double LimitSurface::quadratic_form(const PlanarWrench& w) const {
  return w.cwiseProduct(w).cwiseQuotient(tau_).sum();
}

Eigen::Vector3d LimitSurface::gradient(const PlanarWrench& w) const {
  return 2.0 * w.cwiseQuotient(tau_);
}

PlanarWrench EllipseArc::at(double theta) const {
  return m + a * std::cos(theta) + b * std::sin(theta);
}

Eigen::Vector2d EllipseArc::wedge_coords(double theta) const {
  return t0 + c1 * std::cos(theta) + c2 * std::sin(theta);
}

bool EllipseArc::in_interval(double theta, double tol) const {
  return theta >= interval.lo - tol && theta <= interval.hi + tol;
}

AngleSet sinusoid_nonneg(double p, double q, double r) {
  const double rho = std::hypot(q, r);
  if (p >= rho) return AngleSet::full();
  if (p < -rho) return {};
  const double psi = std::atan2(r, q);
  const double half = std::acos(std::clamp(-p / rho, -1.0, 1.0));
  return AngleSet::from_interval(psi - half, psi + half);
}

namespace {

constexpr double kParallelTol = 1e-6;

EllipseArc single_ray(const Eigen::Vector3d& g, const Eigen::Vector3d& u,
                      const PlanarWrench& apex, const PlanarWrench& ray) {
  const double A = u.dot(u);
  const double B = 2.0 * g.dot(u);
  const double C = g.dot(g) - 1.0;
  const double t = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
  EllipseArc arc;
  arc.ray_count = 1;
  arc.m = apex + t * ray;
  arc.t0 = {t, 0.0};
  arc.interval = {0.0, 0.0};
  return arc;
}

}  // namespace

EllipseArc intersect_wedge_ellipsoid(const LimitSurface& ls, const WrenchWedge& ws) {
  if (ws.rays.empty() || ws.rays.size() > 2) {
    throw Error(ErrorKind::DegenerateWedge, "wedge needs one or two rays");
  }
  for (const auto& r : ws.rays) {
    if (!(r.norm() > 0) || !r.allFinite()) {
      throw Error(ErrorKind::DegenerateWedge, "wedge ray is zero or not finite");
    }
  }
  if (ls.quadratic_form(ws.apex) > 1.0) {
    throw Error(ErrorKind::ApexOutsideLS,
                "gravity wrench lies outside the limit surface");
  }
  const Eigen::Vector3d sc = ls.tau().cwiseSqrt();
  const Eigen::Vector3d g = ws.apex.cwiseQuotient(sc);

  if (ws.rays.size() == 1) {
    return single_ray(g, ws.rays[0].cwiseQuotient(sc), ws.apex, ws.rays[0]);
  }
  const PlanarWrench& w1 = ws.rays[0];
  const PlanarWrench& w2 = ws.rays[1];
  const double cosang = w1.dot(w2) / (w1.norm() * w2.norm());
  const double ang = std::acos(std::clamp(cosang, -1.0, 1.0));
  if (ang < kParallelTol) {
    return single_ray(g, w1.cwiseQuotient(sc), ws.apex, w1);
  }
  if (kPi - ang < kParallelTol) {
    throw Error(ErrorKind::DegenerateWedge, "wedge rays are opposite");
  }

  Eigen::Matrix<double, 3, 2> W;
  W << w1, w2;
  const Eigen::Matrix<double, 3, 2> U = sc.asDiagonal().inverse() * W;
  const Eigen::Matrix2d A = U.transpose() * U;
  const Eigen::Vector2d bb = U.transpose() * g;
  const double c = g.dot(g) - 1.0;
  const Eigen::Vector2d Ainv_b = A.ldlt().solve(bb);
  const Eigen::Vector2d t0 = -Ainv_b;
  const double k = bb.dot(Ainv_b) - c;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(A);
  const Eigen::Vector2d lam = eig.eigenvalues();
  const Eigen::Matrix2d V = eig.eigenvectors();

  EllipseArc arc;
  arc.t0 = t0;
  arc.c1 = V.col(0) * std::sqrt(k / lam(0));
  arc.c2 = V.col(1) * std::sqrt(k / lam(1));
  arc.m = ws.apex + W * t0;
  arc.a = W * arc.c1;
  arc.b = W * arc.c2;

  const AngleSet ok = sinusoid_nonneg(t0(0), arc.c1(0), arc.c2(0))
                          .intersect(sinusoid_nonneg(t0(1), arc.c1(1), arc.c2(1)));
  const auto iv = ok.intervals();
  // The apex is inside the ellipse, so the clipped set is one arc.
  if (iv.size() != 1) {
    throw Error(ErrorKind::DegenerateWedge, "wedge clipping did not give a single arc");
  }
  arc.interval = iv[0];
  return arc;
}

}  // namespace conemech
