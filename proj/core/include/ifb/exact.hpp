#pragma once

// Closed-form solution pairs of the coupled system, used as oracles.
//
// Coefficients are re-derived for n = 2:
//   (c t^{4/3})'^2 (c t^{4/3})'' = 1      needs c^3 = 81/64, c = 3^{4/3}/4
//   Delta(|x|^2 / 4) = 1
//   (t^{2+a})'' = (2+a)(1+a) t^a

#include <functional>
#include <string>

#include "ifb/field.hpp"

namespace ifb {

/// 3^{4/3} / 4, the coefficient of the 4/3-power profile.
double growth_coefficient();

/// (2 + alpha)(1 + alpha).
double c_alpha(double alpha);

/// Which of the three inclusion checks the pair is expected to pass.
struct ExpectedChecks {
  bool fbUInFbV = true;         // (a) FB(u) within FB(v)
  bool vInsideU = true;         // (b) {v > 0} within {u > 0}
  bool intrinsicMatchesU = true;  // (c) FB(intrinsic) equals FB(u)
  bool nonnegative = true;
  bool intrinsicFbEmpty = false;
};

struct ExactPair {
  std::string name;
  int dimension = 2;
  PointFunction u;
  PointFunction v;
  PointFunction f;
  PointFunction g;
  /// Distances to FB(u) and FB(v); the residual collars are measured with these.
  PointFunction distanceToFbU;
  PointFunction distanceToFbV;
  /// u has an unbounded Hessian on FB(u); nodes closer than
  /// `singularExclusion` are left out of the u-residual.
  double singularExclusion = 0.15;
  std::string geometry;
  ExpectedChecks expected;
};

ExactPair example_radial();

/// u = c (x1)_+^{4/3}, v = (x1 - eps)_+^{2+alpha}, f = 1,
/// g = C_alpha (x1 - eps)_+^alpha. alpha = 0 is admitted only with eps = 0,
/// where it denotes the coupled pair v = (x1)_+^2 / 2, g = 1.
/// BadParameter unless alpha > 0 (or the special case) and 0 <= eps < 1/2.
ExactPair example_halfspace(double alpha, double eps);

/// u radial, v = y^2 / 2: FB(v) is the line y = 0, FB(u) only the origin.
ExactPair example_uncoupled();

/// Radial u with v = |x|^2 / 4 - eps^2, negative on r < 2 eps.
/// BadParameter unless 0 < eps < 1/4.
ExactPair example_shifted_paraboloid(double eps);

struct OracleLevel {
  double h = 0.0;
  double uResidual = 0.0;  // sup |Delta_inf,h u - f| on the asserted u-region
  double vResidual = 0.0;  // sup |Delta_h v - g| on the asserted v-region
  std::size_t uNodes = 0;
  std::size_t vNodes = 0;
};

struct OracleReport {
  std::string name;
  OracleLevel coarse;
  OracleLevel fine;
  /// log2(coarse / fine); +inf when the fine residual vanishes.
  double uOrder = 0.0;
  double vOrder = 0.0;

  std::string describe() const;
};

/// Residuals at or below this count as exactly zero.
inline constexpr double kExactZero = 1e-9;

/// Samples the pair on `grid` and on its h/2 refinement and measures both
/// operator residuals where each equation is asserted: u-equation on
/// {v > 0}, v-equation on {u > 0}, each at least 3h from the free
/// boundaries and outside the singular exclusion for u. OracleFailure when a
/// residual exceeds 50 h^{1.5} on either level.
OracleReport verify_example(const ExactPair& pair, const Grid& grid);

/// One level of verify_example without the failure check.
OracleLevel oracle_residuals(const ExactPair& pair, const Grid& grid);

}  // namespace ifb
