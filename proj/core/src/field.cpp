#include "ifb/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "ifb/error.hpp"

namespace ifb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonDivisibleExtent: return "NonDivisibleExtent";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::BoundaryNode: return "BoundaryNode";
    case ErrorCode::EmptyBall: return "EmptyBall";
    case ErrorCode::NegativityViolation: return "NegativityViolation";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NegativeBoundary: return "NegativeBoundary";
    case ErrorCode::PointTooDeep: return "PointTooDeep";
    case ErrorCode::RadiiUnresolvable: return "RadiiUnresolvable";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::EmptyFB: return "EmptyFB";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::FixedPointNonConvergence: return "FixedPointNonConvergence";
  }
  return "Unknown";
}

Point Grid::coord(std::size_t node) const {
  const auto [i, j] = index(node);
  return coord(i, j);
}

bool Grid::is_boundary(std::size_t node) const {
  const auto [i, j] = index(node);
  if (i == 0 || i + 1 == dims[0]) return true;
  if (dimension == 2 && (j == 0 || j + 1 == dims[1])) return true;
  return false;
}

bool Grid::contains(const Point& p, double slack) const {
  for (int k = 0; k < dimension; ++k) {
    if (p[k] < lo[k] - slack || p[k] > hi[k] + slack) return false;
  }
  return true;
}

Grid make_grid(std::span<const double> lo, std::span<const double> hi, double h) {
  if (lo.size() != hi.size() || lo.empty() || lo.size() > 2) {
    throw Error(ErrorCode::BadParameter, "grid corners must both have 1 or 2 coordinates");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::BadParameter, "grid spacing must be positive");
  }
  Grid grid;
  grid.dimension = static_cast<int>(lo.size());
  grid.h = h;
  for (int k = 0; k < grid.dimension; ++k) {
    if (!(hi[k] > lo[k])) {
      throw Error(ErrorCode::BadParameter, "grid requires hi > lo on every axis");
    }
    const double cells = (hi[k] - lo[k]) / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded)) {
      throw Error(ErrorCode::NonDivisibleExtent,
                  "extent " + std::to_string(hi[k] - lo[k]) + " is not a multiple of h=" +
                      std::to_string(h));
    }
    grid.lo[k] = lo[k];
    grid.hi[k] = hi[k];
    grid.dims[k] = static_cast<std::size_t>(rounded) + 1;
    if (grid.dims[k] < 3) {
      throw Error(ErrorCode::BadParameter, "grid needs at least 3 nodes per axis");
    }
  }
  return grid;
}

Grid make_grid(std::initializer_list<double> lo, std::initializer_list<double> hi, double h) {
  return make_grid(std::span<const double>(lo.begin(), lo.size()),
                   std::span<const double>(hi.begin(), hi.size()), h);
}

Grid unit_box(int dimension, double h) {
  if (dimension == 1) return make_grid({-1.0}, {1.0}, h);
  return make_grid({-1.0, -1.0}, {1.0, 1.0}, h);
}

bool can_coarsen(const Grid& grid, std::size_t minCells) {
  for (int a = 0; a < grid.dimension; ++a) {
    const std::size_t cells = grid.dims[a] - 1;
    if (cells % 2 != 0 || cells / 2 < minCells) return false;
  }
  return true;
}

Grid coarsen(const Grid& grid) {
  if (!can_coarsen(grid)) throw Error(ErrorCode::BadParameter, "grid has no coarser level with spacing 2h");
  Grid out = grid;
  out.h = 2.0 * grid.h;
  out.dims[0] = (grid.dims[0] - 1) / 2 + 1;
  if (grid.dimension == 2) out.dims[1] = (grid.dims[1] - 1) / 2 + 1;
  return out;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values, FieldKind kind)
    : grid_(grid), values_(std::move(values)), kind_(kind) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::GridMismatch, "value count does not match grid size");
  }
}

ScalarField ScalarField::constant(const Grid& grid, double value, FieldKind kind) {
  return ScalarField(grid, std::vector<double>(grid.size(), value), kind);
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

ScalarField sample(const PointFunction& fn, const Grid& grid, FieldKind kind) {
  std::vector<double> values(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point p = grid.coord(n);
    values[n] = fn(p);
    if (!std::isfinite(values[n])) {
      throw Error(ErrorCode::NonFiniteSample,
                  "non-finite value at (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ")");
    }
  }
  return ScalarField(grid, std::move(values), kind);
}

namespace {

void require_interior(const Grid& grid, std::size_t node) {
  if (node >= grid.size() || grid.is_boundary(node)) {
    throw Error(ErrorCode::BoundaryNode, "stencil needs an interior node, got " + std::to_string(node));
  }
}

}  // namespace

Vec2 gradient_at(const ScalarField& field, std::size_t node) {
  const Grid& g = field.grid();
  require_interior(g, node);
  const double inv2h = 0.5 / g.h;
  Vec2 p{(field[node + 1] - field[node - 1]) * inv2h, 0.0};
  if (g.dimension == 2) {
    const std::size_t s = g.dims[0];
    p[1] = (field[node + s] - field[node - s]) * inv2h;
  }
  return p;
}

SymMatrix2 hessian_at(const ScalarField& field, std::size_t node) {
  const Grid& g = field.grid();
  require_interior(g, node);
  const double invh2 = 1.0 / (g.h * g.h);
  const double c = field[node];
  SymMatrix2 m;
  m.xx = (field[node + 1] - 2.0 * c + field[node - 1]) * invh2;
  if (g.dimension == 2) {
    const std::size_t s = g.dims[0];
    m.yy = (field[node + s] - 2.0 * c + field[node - s]) * invh2;
    m.xy = (field[node + s + 1] - field[node + s - 1] - field[node - s + 1] + field[node - s - 1]) *
           (0.25 * invh2);
  }
  return m;
}

void for_each_in_ball(const Grid& grid, const BallSpec& ball,
                      const std::function<void(std::size_t)>& visit) {
  // Nodes sitting exactly on the sphere must count despite rounding.
  const double r2 = ball.radius * ball.radius * (1.0 + 1e-12) + 1e-300;
  std::array<std::size_t, 2> first{0, 0};
  std::array<std::size_t, 2> last{0, 0};
  for (int k = 0; k < grid.dimension; ++k) {
    const double a = std::ceil((ball.center[k] - ball.radius - grid.lo[k]) / grid.h - 1e-9);
    const double b = std::floor((ball.center[k] + ball.radius - grid.lo[k]) / grid.h + 1e-9);
    const double top = static_cast<double>(grid.dims[k] - 1);
    if (b < 0.0 || a > top) return;
    first[k] = static_cast<std::size_t>(std::max(0.0, a));
    last[k] = static_cast<std::size_t>(std::min(top, b));
  }
  for (std::size_t j = first[1]; j <= last[1]; ++j) {
    for (std::size_t i = first[0]; i <= last[0]; ++i) {
      const Point p = grid.coord(i, j);
      const double dx = p[0] - ball.center[0];
      const double dy = grid.dimension == 2 ? p[1] - ball.center[1] : 0.0;
      if (dx * dx + dy * dy <= r2) visit(grid.node(i, j));
    }
  }
}

double sup_on_ball(const ScalarField& field, const BallSpec& ball) {
  if (!(ball.radius > 0.0)) throw Error(ErrorCode::BadParameter, "ball radius must be positive");
  bool any = false;
  double best = 0.0;
  for_each_in_ball(field.grid(), ball, [&](std::size_t n) {
    if (!any || field[n] > best) best = field[n];
    any = true;
  });
  if (!any) throw Error(ErrorCode::EmptyBall, "no lattice node inside the ball");
  return best;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

ScalarField intrinsic_norm(const ScalarField& u, const ScalarField& v, double clampTol) {
  require_same_grid(u, v);
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (u[n] < -clampTol || v[n] < -clampTol) {
      const Point p = u.grid().coord(n);
      throw Error(ErrorCode::NegativityViolation,
                  "pair is negative at (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                      "): u=" + std::to_string(u[n]) + " v=" + std::to_string(v[n]));
    }
    out[n] = std::sqrt(std::max(u[n], 0.0)) + std::cbrt(std::max(v[n], 0.0));
  }
  return ScalarField(u.grid(), std::move(out), FieldKind::derived);
}

double interpolate(const ScalarField& field, const Point& p) {
  const Grid& g = field.grid();
  std::array<std::size_t, 2> base{0, 0};
  std::array<double, 2> t{0.0, 0.0};
  for (int k = 0; k < g.dimension; ++k) {
    const double s = (p[k] - g.lo[k]) / g.h;
    const double top = static_cast<double>(g.dims[k] - 1);
    if (s < -1e-9 || s > top + 1e-9) {
      throw Error(ErrorCode::BadParameter, "interpolation point outside the grid");
    }
    const double cl = std::clamp(s, 0.0, top);
    const double fl = std::min(std::floor(cl), top - 1.0);
    base[k] = static_cast<std::size_t>(fl);
    t[k] = cl - fl;
  }
  if (g.dimension == 1) {
    return (1.0 - t[0]) * field.at(base[0]) + t[0] * field.at(base[0] + 1);
  }
  const auto [i, j] = base;
  return (1.0 - t[0]) * (1.0 - t[1]) * field.at(i, j) + t[0] * (1.0 - t[1]) * field.at(i + 1, j) +
         (1.0 - t[0]) * t[1] * field.at(i, j + 1) + t[0] * t[1] * field.at(i + 1, j + 1);
}

ScalarField resample(const ScalarField& field, const Grid& target) {
  const Grid& src = field.grid();
  if (src.dimension != target.dimension || src.lo != target.lo || src.hi != target.hi) {
    throw Error(ErrorCode::GridMismatch, "resample needs grids over the same box");
  }
  ScalarField out = ScalarField::constant(target, 0.0, field.kind());
  for (std::size_t n = 0; n < target.size(); ++n) {
    Point p = target.coord(n);
    // Clamp roundoff so boundary nodes stay inside the source box.
    for (int a = 0; a < target.dimension; ++a) p[a] = std::clamp(p[a], src.lo[a], src.hi[a]);
    out[n] = interpolate(field, p);
  }
  return out;
}

void write_csv(const ScalarField& field, std::ostream& out) {
  const Grid& g = field.grid();
  out << "x,y,value\n";
  char buf[96];
  for (std::size_t j = 0; j < g.dims[1]; ++j) {
    for (std::size_t i = 0; i < g.dims[0]; ++i) {
      const Point p = g.coord(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p[0], p[1], field.at(i, j));
      out << buf;
    }
  }
}

void write_pgm(const ScalarField& field, std::ostream& out) {
  const Grid& g = field.grid();
  const double lo = field.min();
  const double span = field.max() - lo;
  out << "P2\n" << g.dims[0] << ' ' << g.dims[1] << "\n255\n";
  for (std::size_t row = 0; row < g.dims[1]; ++row) {
    const std::size_t j = g.dims[1] - 1 - row;
    for (std::size_t i = 0; i < g.dims[0]; ++i) {
      const double t = span > 0.0 ? (field.at(i, j) - lo) / span : 0.0;
      out << static_cast<int>(std::lround(255.0 * t)) << (i + 1 == g.dims[0] ? '\n' : ' ');
    }
  }
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double sup_abs_difference(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

}  // namespace ifb
