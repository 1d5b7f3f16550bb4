#pragma once

// Growth exponents, non-degeneracy and density profiles, porosity and box
// counting on free boundary cell sets, and the comparison experiment.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ifb/coupled.hpp"
#include "ifb/field.hpp"
#include "ifb/free_boundary.hpp"

namespace ifb {

/// Geometric radii from hi down to lo with `perOctave` steps per factor of
/// two; lo is included when it falls on the sequence to within 1e-9.
std::vector<double> dyadic_radii(double lo, double hi, int perOctave = 2);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slopeStdError = 0.0;
};

/// Ordinary least squares y = slope x + intercept; BadParameter for fewer
/// than two points or a constant x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

struct ExponentFit {
  Point point{};
  std::vector<double> radii;  // strictly decreasing
  std::vector<double> sups;
  double slope = 0.0;
  double slopeStdError = 0.0;
  double intercept = 0.0;
};

/// log-log fit of sup_{B_r(y)} field against r. DegenerateData for fewer than
/// four radii or a non-positive sup; BadParameter for a radius below 4h.
ExponentFit growth_exponent(const ScalarField& field, const Point& y, std::span<const double> radii);

struct NondegeneracyProfile {
  Point point{};
  std::vector<double> radii;
  std::vector<double> sups;    // sup of the intrinsic norm
  std::vector<double> ratios;  // sup / r^{2/3}
  double minRatio = 0.0;
  double threshold = 0.0;      // 0.5 (C_g / 2)^{1/3}, C_g = g_inf / 2
  bool pass = false;
};

/// DegenerateData when g_inf <= 0 or the intrinsic norm vanishes on the
/// smallest ball (y is then not on the closure of the positivity set).
NondegeneracyProfile nondegeneracy_profile(const ScalarField& u, const ScalarField& v, const Point& y,
                                           std::span<const double> radii, double gInf);

struct DensityProfile {
  Point point{};
  std::vector<double> radii;
  std::vector<double> fractions;  // nodes with u > tau_u or v > tau_v, over all nodes
  double minFraction = 0.0;
};

/// EmptyBall when a ball contains no node.
DensityProfile density_profile(const ScalarField& u, const ScalarField& v, const Point& x0,
                               std::span<const double> radii, const Thresholds& tau);

struct PorositySample {
  Point center{};
  double radius = 0.0;
  double delta = 0.0;
};

struct PorosityEstimate {
  double delta = 0.0;  // minimum over samples
  std::vector<PorositySample> samples;
  std::string warning;  // set when delta == 0
};

/// For sampled FB cell centers x and each radius r, the largest delta with a
/// ball B_{delta r}(y) inside B_r(x) and clear of every FB cell square. The
/// candidate centers y are the nodes, cell centers and edge midpoints of the
/// lattice. At most `maxCenters` cells are sampled, evenly strided. EmptyFB
/// when fb is empty.
PorosityEstimate porosity_estimate(const FreeBoundaryCells& fb, std::span<const double> radii,
                                   std::size_t maxCenters = 256);

struct BoxDimension {
  std::vector<double> sizes;
  std::vector<double> counts;
  double slope = 0.0;
  double slopeStdError = 0.0;
};

/// Boxes of side s (anchored at the grid's lower corner) holding an FB cell
/// center, fitted as log N against log(1/s). EmptyFB when fb is empty;
/// BadParameter for fewer than four sizes or a size below h.
BoxDimension box_dimension(const FreeBoundaryCells& fb, std::span<const double> sizes);

/// 1, 2, 4, ... cell widths, `count` of them.
std::vector<double> dyadic_box_sizes(double h, int count);

struct ComparisonReport {
  double minDifference = 0.0;  // min over nodes of v1 - v2
  Point argmin{};
  double tolerance = 0.0;
  bool accepted1 = false;
  bool accepted2 = false;
  bool pass = false;  // both accepted and minDifference >= -tolerance

  std::string describe() const;
};

/// Solves both specs and compares the v-components. HypothesisViolation
/// unless g1 < g2 at every node and psi1 >= psi2 on the boundary;
/// GridMismatch when the grids differ. The tolerance is twice the sum of the
/// two inner Poisson residual tolerances.
ComparisonReport comparison_experiment(const ProblemSpec& spec1, const ProblemSpec& spec2,
                                       const PenalizationSchedule& schedule, const CoupledParams& params);

/// "x,y,radius,sup,ratio" rows.
void write_profile_csv(const NondegeneracyProfile& profile, std::ostream& out);
/// "x,y,radius,fraction" rows.
void write_density_csv(const DensityProfile& profile, std::ostream& out);
/// "name,x,y,slope,stderr,intercept,radii" rows, one per fit.
void write_fits_csv(std::span<const std::pair<std::string, ExponentFit>> fits, std::ostream& out);

}  // namespace ifb
