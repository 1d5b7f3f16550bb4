#pragma once

// Uniform box lattices, node-valued fields and the centered difference
// stencils everything else is built on.

#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace ifb {

using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

struct SymMatrix2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }
  bool operator==(const SymMatrix2&) const = default;
};

/// Uniform lattice over the box [lo, hi] with equal spacing h on every axis.
/// One-dimensional grids keep dims[1] == 1 and ignore the second coordinate.
struct Grid {
  int dimension = 2;
  Point lo{};
  Point hi{};
  double h = 0.0;
  std::array<std::size_t, 2> dims{1, 1};

  std::size_t size() const { return dims[0] * dims[1]; }
  std::size_t node(std::size_t i, std::size_t j = 0) const { return i + dims[0] * j; }
  std::array<std::size_t, 2> index(std::size_t node) const {
    return {node % dims[0], node / dims[0]};
  }
  Point coord(std::size_t node) const;
  Point coord(std::size_t i, std::size_t j) const {
    return {lo[0] + static_cast<double>(i) * h,
            dimension == 2 ? lo[1] + static_cast<double>(j) * h : 0.0};
  }
  bool is_boundary(std::size_t node) const;
  bool is_interior(std::size_t node) const { return !is_boundary(node); }
  bool contains(const Point& p, double slack = 0.0) const;

  bool operator==(const Grid&) const = default;
};

/// Builds the lattice; the extent on every axis must be an integer multiple
/// of h to within 1e-9 (NonDivisibleExtent otherwise).
Grid make_grid(std::span<const double> lo, std::span<const double> hi, double h);
Grid make_grid(std::initializer_list<double> lo, std::initializer_list<double> hi, double h);

/// Square [-1,1]^n lattice, the default experiment domain.
Grid unit_box(int dimension, double h);

/// True when every node count is odd and halving keeps at least `minCells`
/// cells per axis.
bool can_coarsen(const Grid& grid, std::size_t minCells = 2);
/// The same box at spacing 2h; BadParameter unless can_coarsen.
Grid coarsen(const Grid& grid);

enum class FieldKind { solution, source, residual, derived };

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(Grid grid, std::vector<double> values, FieldKind kind = FieldKind::derived);

  static ScalarField constant(const Grid& grid, double value, FieldKind kind = FieldKind::derived);

  const Grid& grid() const { return grid_; }
  FieldKind kind() const { return kind_; }
  void set_kind(FieldKind kind) { kind_ = kind; }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  double& operator[](std::size_t node) { return values_[node]; }
  double at(std::size_t i, std::size_t j = 0) const { return values_[grid_.node(i, j)]; }

  double min() const;
  double max() const;
  bool all_finite() const;

 private:
  Grid grid_{};
  std::vector<double> values_;
  FieldKind kind_ = FieldKind::derived;
};

struct BallSpec {
  Point center{};
  double radius = 0.0;
};

using PointFunction = std::function<double(const Point&)>;

/// Evaluates fn at every node; NonFiniteSample if any value is NaN/Inf.
ScalarField sample(const PointFunction& fn, const Grid& grid, FieldKind kind = FieldKind::derived);

/// Centered first differences; BoundaryNode for nodes on the box boundary.
Vec2 gradient_at(const ScalarField& field, std::size_t node);

/// Second differences with the four-point cross stencil off the diagonal.
SymMatrix2 hessian_at(const ScalarField& field, std::size_t node);

/// Maximum over nodes with |x - center| <= radius. EmptyBall if none qualify.
double sup_on_ball(const ScalarField& field, const BallSpec& ball);

/// Calls visit(node) for every lattice node in the closed ball.
void for_each_in_ball(const Grid& grid, const BallSpec& ball,
                      const std::function<void(std::size_t)>& visit);

/// Per-node max(u,0)^{1/2} + max(v,0)^{1/3}. Values below -clampTol raise
/// NegativityViolation rather than being clamped.
ScalarField intrinsic_norm(const ScalarField& u, const ScalarField& v, double clampTol = 1e-6);

/// Bilinear (linear in 1D) interpolation; p must lie inside the box.
double interpolate(const ScalarField& field, const Point& p);

void require_same_grid(const ScalarField& a, const ScalarField& b);

/// Values at the nodes of `target`, a grid over the same box: copied where
/// nodes coincide, bilinear in between.
ScalarField resample(const ScalarField& field, const Grid& target);

// "x,y,value" rows, x fastest, 17 significant digits.
void write_csv(const ScalarField& field, std::ostream& out);
// Plain PGM (P2), min-max normalized to 0..255, top row = largest y.
void write_pgm(const ScalarField& field, std::ostream& out);

double sup_norm(std::span<const double> values);
double sup_abs_difference(const ScalarField& a, const ScalarField& b);

}  // namespace ifb
