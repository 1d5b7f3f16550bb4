#include "ifb/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "ifb/error.hpp"

namespace ifb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t cells_x(const Grid& g) { return g.dims[0] - 1; }
std::size_t cells_y(const Grid& g) { return g.dimension == 2 ? g.dims[1] - 1 : 1; }

// Squared 1D distance transform (Felzenszwalb-Huttenlocher) of f, in place.
void distance_1d(std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  std::vector<std::size_t> v(n);
  std::vector<double> z(n + 1);
  std::size_t k = 0;
  std::size_t first = 0;
  while (first < n && f[first] == kInf) ++first;
  if (first == n) return;
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double qd = static_cast<double>(q);
    double s = 0.0;
    while (true) {
      const double vk = static_cast<double>(v[k]);
      s = ((f[q] + qd * qd) - (f[v[k]] + vk * vk)) / (2.0 * qd - 2.0 * vk);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      v[k] = q;
      z[k] = -kInf;
      z[k + 1] = kInf;
    } else {
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double qd = static_cast<double>(q);
    while (z[k + 1] < qd) ++k;
    const double dq = qd - static_cast<double>(v[k]);
    d[q] = dq * dq + f[v[k]];
  }
  f = std::move(d);
}

}  // namespace

NodeSet::NodeSet(Grid grid, std::vector<std::uint8_t> mask) : grid_(grid), mask_(std::move(mask)) {
  if (mask_.size() != grid_.size()) throw Error(ErrorCode::GridMismatch, "mask length must equal the node count");
}

std::size_t NodeSet::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

bool NodeSet::subset_of(const NodeSet& other) const {
  if (!(grid_ == other.grid_)) throw Error(ErrorCode::GridMismatch, "node sets live on different grids");
  for (std::size_t n = 0; n < mask_.size(); ++n) {
    if (mask_[n] && !other.mask_[n]) return false;
  }
  return true;
}

Point FreeBoundaryCells::center(const Cell& cell) const {
  const Point p = grid.coord(cell.i, cell.j);
  return {p[0] + 0.5 * grid.h, grid.dimension == 2 ? p[1] + 0.5 * grid.h : 0.0};
}

bool FreeBoundaryCells::contains(const Cell& cell) const {
  return std::binary_search(cells.begin(), cells.end(), cell);
}

NodeSet positivity_set(const ScalarField& field, double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::BadParameter, "threshold must be nonnegative");
  std::vector<std::uint8_t> mask(field.size());
  for (std::size_t n = 0; n < field.size(); ++n) mask[n] = field[n] > tau ? 1 : 0;
  return NodeSet(field.grid(), std::move(mask));
}

FreeBoundaryCells extract_fb(const NodeSet& set) {
  const Grid& g = set.grid();
  FreeBoundaryCells fb{g, {}};
  for (std::size_t j = 0; j < cells_y(g); ++j) {
    for (std::size_t i = 0; i < cells_x(g); ++i) {
      int inside = 0;
      int corners = 0;
      for (std::size_t dj = 0; dj < (g.dimension == 2 ? 2u : 1u); ++dj) {
        for (std::size_t di = 0; di < 2; ++di) {
          inside += set.contains(g.node(i + di, j + dj)) ? 1 : 0;
          ++corners;
        }
      }
      if (inside > 0 && inside < corners) fb.cells.push_back({i, j});
    }
  }
  std::sort(fb.cells.begin(), fb.cells.end());
  return fb;
}

double cell_distance(const Cell& a, const Cell& b) {
  const double di = static_cast<double>(a.i) - static_cast<double>(b.i);
  const double dj = static_cast<double>(a.j) - static_cast<double>(b.j);
  return std::hypot(di, dj);
}

void squared_distance_transform(std::vector<double>& f, std::size_t nx, std::size_t ny) {
  if (f.size() != nx * ny) throw Error(ErrorCode::BadParameter, "distance transform needs nx * ny values");
  std::vector<double> line;
  for (std::size_t j = 0; j < ny; ++j) {
    line.assign(f.begin() + static_cast<std::ptrdiff_t>(nx * j), f.begin() + static_cast<std::ptrdiff_t>(nx * (j + 1)));
    distance_1d(line);
    std::copy(line.begin(), line.end(), f.begin() + static_cast<std::ptrdiff_t>(nx * j));
  }
  if (ny > 1) {
    line.resize(ny);
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) line[j] = f[i + nx * j];
      distance_1d(line);
      for (std::size_t j = 0; j < ny; ++j) f[i + nx * j] = line[j];
    }
  }
}

std::vector<double> cell_distance_map(const FreeBoundaryCells& fb) {
  const std::size_t nx = cells_x(fb.grid);
  const std::size_t ny = cells_y(fb.grid);
  std::vector<double> map(nx * ny, kInf);
  for (const Cell& c : fb.cells) map[c.i + nx * c.j] = 0.0;
  if (fb.cells.empty()) return map;
  squared_distance_transform(map, nx, ny);
  for (double& d : map) d = std::sqrt(d);
  return map;
}

double directed_cell_distance(const FreeBoundaryCells& from, const FreeBoundaryCells& to) {
  if (from.empty()) return 0.0;
  if (to.empty()) return kInf;
  if (!(from.grid == to.grid)) throw Error(ErrorCode::GridMismatch, "cell sets live on different grids");
  const std::vector<double> map = cell_distance_map(to);
  const std::size_t nx = cells_x(to.grid);
  double worst = 0.0;
  for (const Cell& c : from.cells) worst = std::max(worst, map[c.i + nx * c.j]);
  return worst;
}

double symmetric_cell_distance(const FreeBoundaryCells& a, const FreeBoundaryCells& b) {
  return std::max(directed_cell_distance(a, b), directed_cell_distance(b, a));
}

FreeBoundaryCells cells_near(const FreeBoundaryCells& fb, const FreeBoundaryCells& near, double distance) {
  FreeBoundaryCells out{fb.grid, {}};
  if (near.empty()) return out;
  const std::vector<double> map = cell_distance_map(near);
  const std::size_t nx = cells_x(near.grid);
  for (const Cell& c : fb.cells) {
    if (map[c.i + nx * c.j] <= distance) out.cells.push_back(c);
  }
  return out;
}

Thresholds Thresholds::scaled(double h, double kappa) {
  if (!(h > 0.0) || !(kappa > 0.0)) throw Error(ErrorCode::BadParameter, "thresholds need h > 0 and kappa > 0");
  return {kappa * std::pow(h, 4.0 / 3.0), kappa * h * h};
}

double Thresholds::intrinsic() const { return std::min(std::sqrt(u), std::cbrt(v)); }

namespace {

ScalarField clamped_intrinsic(const ScalarField& u, const ScalarField& v) {
  ScalarField out = ScalarField::constant(u.grid(), 0.0, FieldKind::derived);
  for (std::size_t n = 0; n < u.size(); ++n) out[n] = std::sqrt(std::max(u[n], 0.0)) + std::cbrt(std::max(v[n], 0.0));
  return out;
}

}  // namespace

FreeBoundaryCells intrinsic_fb(const ScalarField& u, const ScalarField& v, const Thresholds& tau) {
  require_same_grid(u, v);
  const FreeBoundaryCells fbU = extract_fb(positivity_set(u, tau.u));
  const FreeBoundaryCells fbV = extract_fb(positivity_set(v, tau.v));
  const FreeBoundaryCells raw = extract_fb(positivity_set(clamped_intrinsic(u, v), tau.intrinsic()));
  return cells_near(cells_near(raw, fbU, kFbTolerance), fbV, kFbTolerance);
}

InclusionReport check_inclusions(const ScalarField& u, const ScalarField& v, const Thresholds& tau) {
  require_same_grid(u, v);
  const NodeSet setU = positivity_set(u, tau.u);
  const NodeSet setV = positivity_set(v, tau.v);
  const FreeBoundaryCells fbU = extract_fb(setU);
  const FreeBoundaryCells fbV = extract_fb(setV);
  const FreeBoundaryCells fbI = intrinsic_fb(u, v, tau);
  InclusionReport report;
  report.tau = tau;
  report.fbU = fbU.size();
  report.fbV = fbV.size();
  report.fbIntrinsic = fbI.size();

  const double a = directed_cell_distance(fbU, fbV);
  report.fbUInFbV = {"fb_u_in_fb_v", a, kFbTolerance, a <= kFbTolerance};

  std::size_t outside = 0;
  for (std::size_t n = 0; n < setV.size(); ++n) {
    if (setV.contains(n) && !setU.contains(n)) ++outside;
  }
  report.vInsideU = {"v_positive_inside_u_positive", static_cast<double>(outside), 0.0, outside == 0};

  const double c = symmetric_cell_distance(fbI, fbU);
  report.intrinsicMatchesU = {"fb_intrinsic_equals_fb_u", c, kFbTolerance, c <= kFbTolerance};
  return report;
}

bool InclusionReport::all_pass() const {
  return fbUInFbV.pass && vInsideU.pass && intrinsicMatchesU.pass;
}

std::string InclusionReport::describe() const {
  std::string out;
  char buf[200];
  for (const InclusionCheck* c : {&fbUInFbV, &vInsideU, &intrinsicMatchesU}) {
    std::snprintf(buf, sizeof buf, "%s value=%g tolerance=%g %s\n", c->name.c_str(), c->value, c->tolerance,
                  c->pass ? "PASS" : "FAIL");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "fb_cells u=%zu v=%zu intrinsic=%zu tau_u=%.6g tau_v=%.6g tau_intrinsic=%.6g\n", fbU,
                fbV, fbIntrinsic, tau.u, tau.v, tau.intrinsic());
  out += buf;
  return out;
}

void InclusionReport::write_csv(std::ostream& out) const {
  out << "check,value,tolerance,pass\n";
  char buf[200];
  for (const InclusionCheck* c : {&fbUInFbV, &vInsideU, &intrinsicMatchesU}) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d\n", c->name.c_str(), c->value, c->tolerance, c->pass ? 1 : 0);
    out << buf;
  }
}

FreeBoundaryCells uncoupled_set(const ScalarField& u, const ScalarField& v, const Thresholds& tau) {
  require_same_grid(u, v);
  const FreeBoundaryCells fbU = extract_fb(positivity_set(u, tau.u));
  const FreeBoundaryCells fbV = extract_fb(positivity_set(v, tau.v));
  if (fbU.empty()) return fbV;
  const std::vector<double> map = cell_distance_map(fbU);
  const std::size_t nx = cells_x(fbU.grid);
  FreeBoundaryCells out{fbV.grid, {}};
  for (const Cell& c : fbV.cells) {
    if (map[c.i + nx * c.j] > kFbTolerance) out.cells.push_back(c);
  }
  return out;
}

Point snap_to_fb(const ScalarField& v, const Cell& cell) {
  const Grid& g = v.grid();
  const FreeBoundaryCells probe{g, {}};
  const Point center = probe.center(cell);
  const long ny = g.dimension == 2 ? static_cast<long>(g.dims[1]) : 1;
  const long jLo = g.dimension == 2 ? static_cast<long>(cell.j) - 1 : 0;
  const long jHi = g.dimension == 2 ? static_cast<long>(cell.j) + 2 : 0;
  double bestValue = kInf;
  double bestDistance = kInf;
  Point best = center;
  for (long j = std::max(0L, jLo); j <= std::min(ny - 1, jHi); ++j) {
    for (long i = std::max(0L, static_cast<long>(cell.i) - 1);
         i <= std::min(static_cast<long>(g.dims[0]) - 1, static_cast<long>(cell.i) + 2); ++i) {
      const std::size_t n = g.node(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const Point p = g.coord(n);
      const double d = std::hypot(p[0] - center[0], p[1] - center[1]);
      const double tie = 1e-12 * std::max(1.0, std::abs(bestValue));
      if (v[n] < bestValue - tie || (std::abs(v[n] - bestValue) <= tie && d < bestDistance)) {
        bestValue = v[n];
        bestDistance = d;
        best = p;
      }
    }
  }
  return best;
}

namespace {

struct Sample {
  double x;
  double y;
  double w;
};

// Unit-disk stencil: the center plus rings k/8, k = 1..8, with 8k points each.
std::vector<Point> disk_stencil() {
  std::vector<Point> pts{{0.0, 0.0}};
  for (int k = 1; k <= 8; ++k) {
    const double rho = k / 8.0;
    const int m = 8 * k;
    for (int a = 0; a < m; ++a) {
      const double t = 2.0 * std::numbers::pi * (a + 0.5 * (k % 2)) / m;
      pts.push_back({rho * std::cos(t), rho * std::sin(t)});
    }
  }
  return pts;
}

double regular_ss(const std::vector<Sample>& samples, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double ss = 0.0;
  for (const Sample& q : samples) {
    const double t = std::max(c * q.x + s * q.y, 0.0);
    const double r = q.w - 0.5 * t * t;
    ss += r * r;
  }
  return ss;
}

// Solves the 3x3 system m x = b by Cramer's rule; zero when singular.
std::array<double, 3> solve3(const std::array<std::array<double, 3>, 3>& m, const std::array<double, 3>& b) {
  auto det = [](const std::array<std::array<double, 3>, 3>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det(m);
  if (std::abs(d) < 1e-300) return {0.0, 0.0, 0.0};
  std::array<double, 3> x{};
  for (int k = 0; k < 3; ++k) {
    auto mk = m;
    for (int r = 0; r < 3; ++r) mk[r][k] = b[r];
    x[k] = det(mk) / d;
  }
  return x;
}

SymMatrix2 clip_nonnegative(const SymMatrix2& a) {
  const double mean = 0.5 * (a.xx + a.yy);
  const double diff = 0.5 * (a.xx - a.yy);
  const double rad = std::hypot(diff, a.xy);
  const double l1 = mean + rad;
  const double l2 = mean - rad;
  if (l2 >= 0.0) return a;
  if (l1 <= 0.0) return {};
  // Keep only the l1 eigenvector (c, s): A = l1 (c, s)(c, s)^T.
  const double theta = 0.5 * std::atan2(2.0 * a.xy, a.xx - a.yy);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {l1 * c * c, l1 * c * s, l1 * s * s};
}

}  // namespace

BlowupClassification classify_blowup(const ScalarField& v, const Point& x0, std::span<const double> radii,
                                     double tauV) {
  const Grid& g = v.grid();
  if (g.dimension != 2) throw Error(ErrorCode::BadParameter, "blow-up classification is two-dimensional");
  if (radii.empty()) throw Error(ErrorCode::RadiiUnresolvable, "no radii given");
  const double rMin = *std::min_element(radii.begin(), radii.end());
  const double rMax = *std::max_element(radii.begin(), radii.end());
  if (rMin < 4.0 * g.h * (1.0 - 1e-12)) {
    throw Error(ErrorCode::RadiiUnresolvable,
                "smallest radius " + std::to_string(rMin) + " is below 4h = " + std::to_string(4.0 * g.h));
  }
  const FreeBoundaryCells fb = extract_fb(positivity_set(v, tauV));
  double nearest = kInf;
  for (const Cell& c : fb.cells) {
    const Point p = fb.center(c);
    nearest = std::min(nearest, std::hypot(p[0] - x0[0], p[1] - x0[1]));
  }
  if (!(nearest <= 1.2 * rMax)) {
    throw Error(ErrorCode::PointTooDeep, "point is " + std::to_string(nearest) + " from FB(v), beyond 1.2 max radius");
  }

  std::vector<Sample> samples;
  for (double r : radii) {
    for (const Point& x : disk_stencil()) {
      const Point p{x0[0] + r * x[0], x0[1] + r * x[1]};
      if (!g.contains(p)) continue;
      samples.push_back({x[0], x[1], interpolate(v, p) / (r * r)});
    }
  }
  if (samples.size() < 3) throw Error(ErrorCode::DegenerateData, "blow-up stencil lies outside the grid");
  const double count = static_cast<double>(samples.size());

  BlowupClassification out;
  out.point = x0;
  out.radii.assign(radii.begin(), radii.end());

  // Regular model: coarse direction scan, then golden-section refinement.
  constexpr int kDirections = 64;
  const double step = 2.0 * std::numbers::pi / kDirections;
  int bestK = 0;
  double bestSs = kInf;
  for (int k = 0; k < kDirections; ++k) {
    const double ss = regular_ss(samples, k * step);
    if (ss < bestSs) {
      bestSs = ss;
      bestK = k;
    }
  }
  double a = (bestK - 1) * step;
  double b = (bestK + 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - phi * (b - a);
  double c2 = a + phi * (b - a);
  double f1 = regular_ss(samples, c1);
  double f2 = regular_ss(samples, c2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - phi * (b - a);
      f1 = regular_ss(samples, c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + phi * (b - a);
      f2 = regular_ss(samples, c2);
    }
  }
  const double theta = 0.5 * (a + b);
  out.direction = {std::cos(theta), std::sin(theta)};
  out.regularResidual = std::sqrt(std::min(bestSs, regular_ss(samples, theta)) / count);

  // Singular model: 1/2 a x^2 + b x y + 1/2 c y^2 by linear least squares.
  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> rhs{};
  for (const Sample& q : samples) {
    const std::array<double, 3> phiQ{0.5 * q.x * q.x, q.x * q.y, 0.5 * q.y * q.y};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += phiQ[r] * q.w;
      for (int s = 0; s < 3; ++s) m[r][s] += phiQ[r] * phiQ[s];
    }
  }
  const std::array<double, 3> coef = solve3(m, rhs);
  out.matrix = clip_nonnegative({coef[0], coef[1], coef[2]});
  double ss = 0.0;
  for (const Sample& q : samples) {
    const double model = 0.5 * (out.matrix.xx * q.x * q.x + 2.0 * out.matrix.xy * q.x * q.y + out.matrix.yy * q.y * q.y);
    ss += (q.w - model) * (q.w - model);
  }
  out.singularResidual = std::sqrt(ss / count);

  const double larger = std::max(out.regularResidual, out.singularResidual);
  if (std::abs(out.regularResidual - out.singularResidual) <= 0.1 * larger) {
    out.verdict = BlowupVerdict::singular;
    out.degenerate = true;
  } else {
    out.verdict = out.regularResidual < out.singularResidual ? BlowupVerdict::regular : BlowupVerdict::singular;
  }
  return out;
}

std::string BlowupClassification::describe() const {
  char buf[300];
  if (verdict == BlowupVerdict::regular) {
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g) Regular e=(%.6f, %.6f) residuals regular=%.3e singular=%.3e%s",
                  point[0], point[1], direction[0], direction[1], regularResidual, singularResidual,
                  degenerate ? " DEGENERATE" : "");
  } else {
    std::snprintf(buf, sizeof buf,
                  "(%.6g, %.6g) Singular A=[%.6f %.6f; %.6f %.6f] trace=%.6f residuals regular=%.3e singular=%.3e%s",
                  point[0], point[1], matrix.xx, matrix.xy, matrix.xy, matrix.yy, matrix.trace(), regularResidual,
                  singularResidual, degenerate ? " DEGENERATE" : "");
  }
  return buf;
}

void write_classifications_csv(std::span<const BlowupClassification> items, std::ostream& out) {
  out << "x,y,verdict,degenerate,e1,e2,a11,a12,a22,trace,residual_regular,residual_singular\n";
  char buf[400];
  for (const BlowupClassification& c : items) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.point[0],
                  c.point[1], c.verdict == BlowupVerdict::regular ? "regular" : "singular", c.degenerate ? 1 : 0,
                  c.direction[0], c.direction[1], c.matrix.xx, c.matrix.xy, c.matrix.yy, c.matrix.trace(),
                  c.regularResidual, c.singularResidual);
    out << buf;
  }
}

}  // namespace ifb
