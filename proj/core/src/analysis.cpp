#include "ifb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <utility>

#include "ifb/error.hpp"

namespace ifb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> decreasing_radii(std::span<const double> radii, double h) {
  std::vector<double> out(radii.begin(), radii.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw Error(ErrorCode::DegenerateData, "radii must be distinct");
  }
  if (out.size() < 4) throw Error(ErrorCode::DegenerateData, "an exponent fit needs at least four radii");
  if (out.back() < 4.0 * h * (1.0 - 1e-9)) {
    throw Error(ErrorCode::DegenerateData, "radii below 4h are not resolved by the lattice");
  }
  return out;
}

}  // namespace

std::vector<double> dyadic_radii(double lo, double hi, int perOctave) {
  if (!(lo > 0.0) || !(hi >= lo) || perOctave < 1) {
    throw Error(ErrorCode::BadParameter, "dyadic radii need 0 < lo <= hi and perOctave >= 1");
  }
  std::vector<double> out;
  const double step = std::exp2(-1.0 / perOctave);
  for (int k = 0;; ++k) {
    const double r = hi * std::pow(step, k);
    if (r < lo * (1.0 - 1e-9)) break;
    out.push_back(r);
  }
  return out;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::BadParameter, "least squares needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::BadParameter, "least squares needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double e = y[k] - (fit.intercept + fit.slope * x[k]);
      ss += e * e;
    }
    fit.slopeStdError = std::sqrt(ss / (n - 2.0) / sxx);
  }
  return fit;
}

ExponentFit growth_exponent(const ScalarField& field, const Point& y, std::span<const double> radii) {
  ExponentFit fit;
  fit.point = y;
  fit.radii = decreasing_radii(radii, field.grid().h);
  std::vector<double> lr;
  std::vector<double> ls;
  for (const double r : fit.radii) {
    const double s = sup_on_ball(field, {y, r});
    if (!(s > 0.0)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "sup on the ball of radius %g is %g; shrink the radii", r, s);
      throw Error(ErrorCode::DegenerateData, buf);
    }
    fit.sups.push_back(s);
    lr.push_back(std::log(r));
    ls.push_back(std::log(s));
  }
  const LineFit line = least_squares(lr, ls);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slopeStdError = line.slopeStdError;
  return fit;
}

NondegeneracyProfile nondegeneracy_profile(const ScalarField& u, const ScalarField& v, const Point& y,
                                           std::span<const double> radii, double gInf) {
  require_same_grid(u, v);
  if (!(gInf > 0.0)) throw Error(ErrorCode::DegenerateData, "non-degeneracy needs inf g > 0");
  if (radii.empty()) throw Error(ErrorCode::DegenerateData, "no radii given");
  const ScalarField w = intrinsic_norm(u, v);
  NondegeneracyProfile p;
  p.point = y;
  p.radii.assign(radii.begin(), radii.end());
  std::sort(p.radii.begin(), p.radii.end(), std::greater<>());
  if (!(sup_on_ball(w, {y, p.radii.back()}) > 0.0)) {
    throw Error(ErrorCode::DegenerateData, "the intrinsic norm vanishes near the point");
  }
  const double cg = 0.5 * gInf;
  p.threshold = 0.5 * std::cbrt(0.5 * cg);
  p.minRatio = kInf;
  for (const double r : p.radii) {
    const double s = sup_on_ball(w, {y, r});
    p.sups.push_back(s);
    p.ratios.push_back(s / std::pow(r, 2.0 / 3.0));
    p.minRatio = std::min(p.minRatio, p.ratios.back());
  }
  p.pass = p.minRatio >= p.threshold;
  return p;
}

DensityProfile density_profile(const ScalarField& u, const ScalarField& v, const Point& x0,
                               std::span<const double> radii, const Thresholds& tau) {
  require_same_grid(u, v);
  DensityProfile p;
  p.point = x0;
  p.radii.assign(radii.begin(), radii.end());
  p.minFraction = radii.empty() ? 0.0 : kInf;
  for (const double r : p.radii) {
    std::size_t total = 0;
    std::size_t positive = 0;
    for_each_in_ball(u.grid(), {x0, r}, [&](std::size_t n) {
      ++total;
      if (u[n] > tau.u || v[n] > tau.v) ++positive;
    });
    if (total == 0) throw Error(ErrorCode::EmptyBall, "no lattice node in the ball");
    p.fractions.push_back(static_cast<double>(positive) / static_cast<double>(total));
    p.minFraction = std::min(p.minFraction, p.fractions.back());
  }
  return p;
}

PorosityEstimate porosity_estimate(const FreeBoundaryCells& fb, std::span<const double> radii,
                                   std::size_t maxCenters) {
  if (fb.empty()) throw Error(ErrorCode::EmptyFB, "porosity of an empty free boundary");
  if (radii.empty() || maxCenters == 0) throw Error(ErrorCode::BadParameter, "porosity needs radii and centers");
  const Grid& g = fb.grid;
  const bool twoD = g.dimension == 2;
  // Half-step lattice: nodes, cell centers and edge midpoints. Distances to
  // the union of cell squares are exact at these points.
  const std::size_t nx = 2 * (g.dims[0] - 1) + 1;
  const std::size_t ny = twoD ? 2 * (g.dims[1] - 1) + 1 : 1;
  std::vector<double> dist(nx * ny, kInf);
  for (const Cell& c : fb.cells) {
    for (std::size_t b = twoD ? 2 * c.j : 0; b <= (twoD ? 2 * c.j + 2 : 0); ++b) {
      for (std::size_t a = 2 * c.i; a <= 2 * c.i + 2; ++a) dist[a + nx * b] = 0.0;
    }
  }
  squared_distance_transform(dist, nx, ny);
  for (double& d : dist) d = std::sqrt(d);

  PorosityEstimate est;
  est.delta = kInf;
  const std::size_t stride = (fb.size() + maxCenters - 1) / maxCenters;
  for (std::size_t k = 0; k < fb.size(); k += stride) {
    const Cell& c = fb.cells[k];
    const long ca = static_cast<long>(2 * c.i + 1);
    const long cb = twoD ? static_cast<long>(2 * c.j + 1) : 0;
    for (const double r : radii) {
      const double big = r / (0.5 * g.h);  // radius in half steps
      const long reach = static_cast<long>(std::floor(big));
      double best = 0.0;
      for (long db = twoD ? -reach : 0; db <= (twoD ? reach : 0); ++db) {
        const long b = cb + db;
        if (b < 0 || b >= static_cast<long>(ny)) continue;
        for (long da = -reach; da <= reach; ++da) {
          const long a = ca + da;
          if (a < 0 || a >= static_cast<long>(nx)) continue;
          const double off = std::hypot(static_cast<double>(da), static_cast<double>(db));
          if (off > big) continue;
          best = std::max(best, std::min(dist[static_cast<std::size_t>(a) + nx * static_cast<std::size_t>(b)], big - off));
        }
      }
      const double delta = best / big;
      est.samples.push_back({fb.center(c), r, delta});
      est.delta = std::min(est.delta, delta);
    }
  }
  if (est.delta <= 0.0) {
    est.delta = 0.0;
    est.warning = "some sampled ball is covered by free boundary cells; porosity estimate is 0";
  }
  return est;
}

std::vector<double> dyadic_box_sizes(double h, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(h * std::exp2(k));
  return out;
}

BoxDimension box_dimension(const FreeBoundaryCells& fb, std::span<const double> sizes) {
  if (fb.empty()) throw Error(ErrorCode::EmptyFB, "box counting of an empty free boundary");
  if (sizes.size() < 4) throw Error(ErrorCode::BadParameter, "box counting needs at least four sizes");
  const Grid& g = fb.grid;
  BoxDimension out;
  std::vector<double> lx;
  std::vector<double> ln;
  for (const double s : sizes) {
    if (s < g.h * (1.0 - 1e-9)) throw Error(ErrorCode::BadParameter, "box sizes must be at least h");
    std::set<std::pair<long, long>> boxes;
    for (const Cell& c : fb.cells) {
      const Point p = fb.center(c);
      boxes.emplace(static_cast<long>(std::floor((p[0] - g.lo[0]) / s)),
                    g.dimension == 2 ? static_cast<long>(std::floor((p[1] - g.lo[1]) / s)) : 0L);
    }
    out.sizes.push_back(s);
    out.counts.push_back(static_cast<double>(boxes.size()));
    lx.push_back(std::log(1.0 / s));
    ln.push_back(std::log(static_cast<double>(boxes.size())));
  }
  const LineFit line = least_squares(lx, ln);
  out.slope = line.slope;
  out.slopeStdError = line.slopeStdError;
  return out;
}

ComparisonReport comparison_experiment(const ProblemSpec& spec1, const ProblemSpec& spec2,
                                       const PenalizationSchedule& schedule, const CoupledParams& params) {
  if (!(spec1.grid == spec2.grid)) throw Error(ErrorCode::GridMismatch, "comparison specs live on different grids");
  spec1.validate();
  spec2.validate();
  const Grid& grid = spec1.grid;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (!(spec1.g[n] < spec2.g[n])) {
      const Point p = grid.coord(n);
      char buf[128];
      std::snprintf(buf, sizeof buf, "g1 < g2 fails at (%g, %g)", p[0], p[1]);
      throw Error(ErrorCode::HypothesisViolation, buf);
    }
    if (grid.is_boundary(n) && spec1.psi[n] < spec2.psi[n]) {
      const Point p = grid.coord(n);
      char buf[128];
      std::snprintf(buf, sizeof buf, "psi1 >= psi2 fails at (%g, %g)", p[0], p[1]);
      throw Error(ErrorCode::HypothesisViolation, buf);
    }
  }
  const SolutionPair s1 = solve_coupled(spec1, schedule, params);
  const SolutionPair s2 = solve_coupled(spec2, schedule, params);
  ComparisonReport report;
  report.accepted1 = s1.accepted;
  report.accepted2 = s2.accepted;
  report.tolerance = 2.0 * (2.0 * params.poisson.residualTol);
  report.minDifference = kInf;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double d = s1.v[n] - s2.v[n];
    if (d < report.minDifference) {
      report.minDifference = d;
      report.argmin = grid.coord(n);
    }
  }
  report.pass = report.accepted1 && report.accepted2 && report.minDifference >= -report.tolerance;
  return report;
}

std::string ComparisonReport::describe() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "min(v1 - v2) = %.3e at (%g, %g), tolerance %.1e, accepted %s/%s: %s", minDifference,
                argmin[0], argmin[1], tolerance, accepted1 ? "yes" : "no", accepted2 ? "yes" : "no",
                pass ? "PASS" : "FAIL");
  return buf;
}

void write_profile_csv(const NondegeneracyProfile& profile, std::ostream& out) {
  out << "x,y,radius,sup,ratio\n";
  char buf[160];
  for (std::size_t k = 0; k < profile.radii.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", profile.point[0], profile.point[1],
                  profile.radii[k], profile.sups[k], profile.ratios[k]);
    out << buf;
  }
}

void write_density_csv(const DensityProfile& profile, std::ostream& out) {
  out << "x,y,radius,fraction\n";
  char buf[128];
  for (std::size_t k = 0; k < profile.radii.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", profile.point[0], profile.point[1], profile.radii[k],
                  profile.fractions[k]);
    out << buf;
  }
}

void write_fits_csv(std::span<const std::pair<std::string, ExponentFit>> fits, std::ostream& out) {
  out << "name,x,y,slope,stderr,intercept,radii\n";
  char buf[160];
  for (const auto& [name, fit] : fits) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", fit.point[0], fit.point[1], fit.slope,
                  fit.slopeStdError, fit.intercept, fit.radii.size());
    out << name << buf;
  }
}

}  // namespace ifb
