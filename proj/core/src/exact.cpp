#include "ifb/exact.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ifb/error.hpp"
#include "ifb/infinity.hpp"
#include "ifb/laplace.hpp"

namespace ifb {

double growth_coefficient() { return std::pow(3.0, 4.0 / 3.0) / 4.0; }

double c_alpha(double alpha) { return (2.0 + alpha) * (1.0 + alpha); }

namespace {

double radius(const Point& p) { return std::hypot(p[0], p[1]); }

PointFunction constant(double value) {
  return [value](const Point&) { return value; };
}

PointFunction radial_u() {
  const double c = growth_coefficient();
  return [c](const Point& p) { return c * std::pow(radius(p), 4.0 / 3.0); };
}

}  // namespace

ExactPair example_radial() {
  ExactPair pair;
  pair.name = "radial";
  pair.u = radial_u();
  pair.v = [](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]); };
  pair.f = constant(1.0);
  pair.g = constant(1.0);
  pair.distanceToFbU = radius;
  pair.distanceToFbV = radius;
  pair.geometry = "FB(u) = FB(v) = FB(intrinsic) = {0}";
  return pair;
}

ExactPair example_halfspace(double alpha, double eps) {
  const bool coupled = alpha == 0.0 && eps == 0.0;
  if (!(alpha > 0.0 || coupled)) {
    throw Error(ErrorCode::BadParameter, "halfspace needs alpha > 0, or alpha = eps = 0 for the coupled pair");
  }
  if (!(eps >= 0.0 && eps < 0.5)) throw Error(ErrorCode::BadParameter, "halfspace needs 0 <= eps < 1/2");
  const double c = growth_coefficient();
  ExactPair pair;
  char name[64];
  std::snprintf(name, sizeof name, "halfspace(%g,%g)", alpha, eps);
  pair.name = name;
  pair.u = [c](const Point& p) { return c * std::pow(std::max(p[0], 0.0), 4.0 / 3.0); };
  pair.f = constant(1.0);
  if (coupled) {
    pair.v = [](const Point& p) {
      const double t = std::max(p[0], 0.0);
      return 0.5 * t * t;
    };
    pair.g = constant(1.0);
  } else {
    const double ca = c_alpha(alpha);
    pair.v = [alpha, eps](const Point& p) { return std::pow(std::max(p[0] - eps, 0.0), 2.0 + alpha); };
    pair.g = [alpha, eps, ca](const Point& p) { return ca * std::pow(std::max(p[0] - eps, 0.0), alpha); };
  }
  pair.distanceToFbU = [](const Point& p) { return std::abs(p[0]); };
  pair.distanceToFbV = [eps](const Point& p) { return std::abs(p[0] - eps); };
  if (eps > 0.0) {
    pair.geometry = "FB(u) = {x1 = 0}, FB(v) = {x1 = " + std::to_string(eps) + "}, FB(intrinsic) empty";
  } else {
    pair.geometry = "FB(u) = FB(v) = FB(intrinsic) = {x1 = 0}";
  }
  if (!coupled) {
    // inf g = 0: v grows like t^{2+alpha} and its thresholded positivity set
    // detaches from FB(u) even at eps = 0.
    pair.expected.fbUInFbV = false;
    pair.expected.intrinsicMatchesU = false;
    pair.expected.intrinsicFbEmpty = true;
  }
  return pair;
}

ExactPair example_uncoupled() {
  ExactPair pair;
  pair.name = "uncoupled";
  pair.u = radial_u();
  pair.v = [](const Point& p) { return 0.5 * p[1] * p[1]; };
  pair.f = constant(1.0);
  pair.g = constant(1.0);
  pair.distanceToFbU = radius;
  pair.distanceToFbV = [](const Point& p) { return std::abs(p[1]); };
  pair.geometry = "FB(u) = {0}, FB(v) = {y = 0}, uncoupled set = {y = 0} minus {0}";
  return pair;
}

ExactPair example_shifted_paraboloid(double eps) {
  if (!(eps > 0.0 && eps < 0.25)) throw Error(ErrorCode::BadParameter, "shifted paraboloid needs 0 < eps < 1/4");
  ExactPair pair;
  char name[64];
  std::snprintf(name, sizeof name, "shifted-paraboloid(%g)", eps);
  pair.name = name;
  pair.u = radial_u();
  pair.v = [eps](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]) - eps * eps; };
  pair.f = constant(1.0);
  pair.g = constant(1.0);
  pair.distanceToFbU = radius;
  pair.distanceToFbV = [eps](const Point& p) { return std::abs(radius(p) - 2.0 * eps); };
  pair.geometry = "v < 0 on r < " + std::to_string(2.0 * eps) + ", FB(v) = {r = " + std::to_string(2.0 * eps) +
                  "}, FB(intrinsic) empty";
  pair.expected = {false, true, false, false, true};
  return pair;
}

OracleLevel oracle_residuals(const ExactPair& pair, const Grid& grid) {
  const ScalarField u = sample(pair.u, grid);
  const ScalarField v = sample(pair.v, grid);
  const ScalarField ru = infinity_residual(u, sample(pair.f, grid));
  const ScalarField rv = laplacian_residual(v, sample(pair.g, grid));
  const double collar = 3.0 * grid.h;
  OracleLevel level;
  level.h = grid.h;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (grid.is_boundary(n)) continue;
    const Point p = grid.coord(n);
    const double dU = pair.distanceToFbU(p);
    const double dV = pair.distanceToFbV(p);
    if (dU < collar || dV < collar) continue;
    if (v[n] > 0.0 && dU >= pair.singularExclusion) {
      level.uResidual = std::max(level.uResidual, std::abs(ru[n]));
      ++level.uNodes;
    }
    if (u[n] > 0.0) {
      level.vResidual = std::max(level.vResidual, std::abs(rv[n]));
      ++level.vNodes;
    }
  }
  return level;
}

namespace {

double order(double coarse, double fine) {
  if (fine <= kExactZero) return std::numeric_limits<double>::infinity();
  return std::log2(coarse / fine);
}

}  // namespace

OracleReport verify_example(const ExactPair& pair, const Grid& grid) {
  std::vector<double> lo(grid.lo.begin(), grid.lo.begin() + grid.dimension);
  std::vector<double> hi(grid.hi.begin(), grid.hi.begin() + grid.dimension);
  const Grid fine = make_grid(lo, hi, 0.5 * grid.h);
  OracleReport report;
  report.name = pair.name;
  report.coarse = oracle_residuals(pair, grid);
  report.fine = oracle_residuals(pair, fine);
  report.uOrder = order(report.coarse.uResidual, report.fine.uResidual);
  report.vOrder = order(report.coarse.vResidual, report.fine.vResidual);
  for (const OracleLevel* level : {&report.coarse, &report.fine}) {
    const double bound = 50.0 * std::pow(level->h, 1.5);
    if (level->uResidual > bound || level->vResidual > bound) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s at h = %g: residuals u %.3e, v %.3e exceed %.3e", pair.name.c_str(),
                    level->h, level->uResidual, level->vResidual, bound);
      throw Error(ErrorCode::OracleFailure, buf);
    }
  }
  return report;
}

std::string OracleReport::describe() const {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%s: h %g -> %g, u-residual %.3e -> %.3e (order %.2f), v-residual %.3e -> %.3e (order %.2f)",
                name.c_str(), coarse.h, fine.h, coarse.uResidual, fine.uResidual, uOrder, coarse.vResidual,
                fine.vResidual, vOrder);
  return buf;
}

}  // namespace ifb
