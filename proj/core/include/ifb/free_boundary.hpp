#pragma once

// Thresholded positivity sets, their boundary cells, the inclusion checks
// between the free boundaries of u, v and the intrinsic norm, and blow-up
// classification of free boundary points of v.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ifb/field.hpp"

namespace ifb {

class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(Grid grid, std::vector<std::uint8_t> mask);

  const Grid& grid() const { return grid_; }
  bool contains(std::size_t node) const { return mask_[node] != 0; }
  std::size_t count() const;
  std::size_t size() const { return mask_.size(); }
  bool subset_of(const NodeSet& other) const;

 private:
  Grid grid_{};
  std::vector<std::uint8_t> mask_;
};

/// A lattice cell named by its lower-left node; in 1D j == 0.
struct Cell {
  std::size_t i = 0;
  std::size_t j = 0;

  auto operator<=>(const Cell&) const = default;
};

struct FreeBoundaryCells {
  Grid grid;
  std::vector<Cell> cells;  // sorted, unique

  bool empty() const { return cells.empty(); }
  std::size_t size() const { return cells.size(); }
  Point center(const Cell& cell) const;
  bool contains(const Cell& cell) const;
};

/// Nodes with value > tau. BadParameter for tau < 0.
NodeSet positivity_set(const ScalarField& field, double tau);

/// Cells whose corners are neither all in nor all out of the set.
FreeBoundaryCells extract_fb(const NodeSet& set);

/// Distance in cell widths between cell centers.
double cell_distance(const Cell& a, const Cell& b);

/// max over `from` of the distance to the nearest cell of `to`; 0 when
/// `from` is empty, +inf when only `to` is.
double directed_cell_distance(const FreeBoundaryCells& from, const FreeBoundaryCells& to);
double symmetric_cell_distance(const FreeBoundaryCells& a, const FreeBoundaryCells& b);

/// In place: f holds 0 on the sites and +inf elsewhere (row-major, nx per
/// row); on return the squared Euclidean distance to the nearest site.
void squared_distance_transform(std::vector<double>& f, std::size_t nx, std::size_t ny);

/// Euclidean distance, in cell widths, from every cell of the lattice to the
/// nearest cell of `fb` (index i + (nx - 1) j); +inf everywhere when empty.
std::vector<double> cell_distance_map(const FreeBoundaryCells& fb);

/// Cells of `fb` within `distance` cells of some cell of `near`.
FreeBoundaryCells cells_near(const FreeBoundaryCells& fb, const FreeBoundaryCells& near, double distance);

struct Thresholds {
  double u = 0.0;
  double v = 0.0;

  /// tau_u = kappa h^{4/3}, tau_v = kappa h^2.
  static Thresholds scaled(double h, double kappa = 0.5);
  /// min(sqrt(tau_u), cbrt(tau_v)): u > tau_u or v > tau_v then implies
  /// intrinsic > tau_I.
  double intrinsic() const;
};

inline constexpr double kFbTolerance = 1.5;

/// The coupled free boundary: boundary cells of {intrinsic > tau_I} that lie
/// within kFbTolerance cells of both FB(u) and FB(v).
FreeBoundaryCells intrinsic_fb(const ScalarField& u, const ScalarField& v, const Thresholds& tau);

struct InclusionCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct InclusionReport {
  Thresholds tau;
  std::size_t fbU = 0;
  std::size_t fbV = 0;
  std::size_t fbIntrinsic = 0;
  InclusionCheck fbUInFbV;           // (a) directed distance FB(u) -> FB(v), cells
  InclusionCheck vInsideU;           // (b) nodes of {v > tau_v} outside {u > tau_u}
  InclusionCheck intrinsicMatchesU;  // (c) symmetric distance FB(intrinsic) <-> FB(u), cells

  bool all_pass() const;
  /// One "check value tolerance PASS|FAIL" line per check.
  std::string describe() const;
  void write_csv(std::ostream& out) const;
};

/// GridMismatch when u and v live on different grids. intrinsic_norm is
/// taken with u, v clamped at zero so negative data is still classified.
InclusionReport check_inclusions(const ScalarField& u, const ScalarField& v, const Thresholds& tau);

/// FB(v) cells farther than kFbTolerance cells from every FB(u) cell.
FreeBoundaryCells uncoupled_set(const ScalarField& u, const ScalarField& v, const Thresholds& tau);

/// The node of the cell's closed 3x3-cell neighbourhood with the smallest v;
/// ties go to the node nearest the cell center.
Point snap_to_fb(const ScalarField& v, const Cell& cell);

enum class BlowupVerdict { regular, singular };

struct BlowupClassification {
  Point point{};
  BlowupVerdict verdict = BlowupVerdict::singular;
  bool degenerate = false;  // model residuals within 10% of each other
  Vec2 direction{1.0, 0.0};  // regular model: 1/2 (e.x)_+^2
  SymMatrix2 matrix{};       // singular model: 1/2 <Ax, x>, A >= 0
  double regularResidual = 0.0;
  double singularResidual = 0.0;
  std::vector<double> radii;

  std::string describe() const;
};

/// Fits both blow-up models to w_r(x) = v(x0 + r x) / r^2 sampled on a fixed
/// polar stencil of the unit disk, aggregated over the radii (RMS).
/// RadiiUnresolvable when min(radii) < 4h; PointTooDeep when x0 is farther
/// than 1.2 max(radii) from every FB(v) cell (threshold tau_v).
BlowupClassification classify_blowup(const ScalarField& v, const Point& x0, std::span<const double> radii,
                                     double tauV);

/// "x,y,verdict,degenerate,e1,e2,a11,a12,a22,trace,residual_regular,residual_singular"
void write_classifications_csv(std::span<const BlowupClassification> items, std::ostream& out);

}  // namespace ifb
