#pragma once

// Penalized coupled system
//   Delta_inf u = f * beta_eps(v),   Delta v = g * beta_eps(u)
// solved by Picard iteration of the alternating map T(u, v) and continued
// along a decreasing sequence of eps.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ifb/field.hpp"
#include "ifb/infinity.hpp"
#include "ifb/laplace.hpp"

namespace ifb {

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 of t = s/eps, clamped to [0,1].
double beta_eps(double s, double eps);

struct ProblemSpec {
  Grid grid;
  ScalarField f;
  ScalarField g;
  ScalarField phi;  // boundary trace for u (interior values ignored)
  ScalarField psi;  // boundary trace for v
  /// Lower bound for min(f, g) asserted by `validate(true)`.
  double c0Check = 0.0;

  /// GridMismatch / NonFiniteSample on malformed data; with `requireNondegenerate`
  /// also HypothesisViolation when min(f, g) < c0Check.
  void validate(bool requireNondegenerate = false) const;
};

struct PenalizationSchedule {
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double perEpsilonTol = 1e-6;
  int fixedPointMaxIters = 200;

  /// ValidationError unless eps is strictly decreasing, positive and its
  /// last entry is at least 2 h^2.
  void validate(const Grid& grid) const;
};

struct IterationRecord {
  double eps = 0.0;
  double h = 0.0;
  int picard = 0;
  double changeU = 0.0;
  double changeV = 0.0;
  int uSweeps = 0;
  int vSweeps = 0;
  bool innerConverged = false;
};

struct CoupledParams {
  /// Penalized sources switch off on whole regions; plain 1.8 over-relaxation
  /// oscillates there, so the coupled default is milder.
  InfinitySolveParams infinity = [] {
    InfinitySolveParams p;
    p.overRelaxation = 1.4;
    return p;
  }();
  SorParams poisson;
  /// Convex weight of the new T-iterate; 1 is plain Picard.
  double damping = 1.0;
  /// Sweep cap for each inner solve during Picard iteration (0: none). A
  /// Picard step only counts toward convergence when both inner solves
  /// reached their residual tolerance within the cap.
  int innerSweepCap = 200;
  /// Solve on the 2h grid first (recursively, while each level keeps at
  /// least `coarsestCells` cells per axis) and start the fine level from
  /// the prolonged result at the coarse level's last eps.
  bool nested = true;
  std::size_t coarsestCells = 32;
  /// Acceptance bound for the four residuals of a SolutionPair.
  double acceptTol = 5e-2;
  /// Called after every Picard step; empty by default.
  std::function<void(const IterationRecord&)> onIteration;
};

/// The four residual numbers every accepted pair is judged by.
struct ResidualRecord {
  double delta = 0.0;
  double uInequality = 0.0;  // sup (Delta_inf,h u - f)_+ over the interior
  double uEquation = 0.0;    // sup |Delta_inf,h u - f| on {v > delta}
  double vInequality = 0.0;  // sup (Delta_h v - g)_+ over the interior
  double vEquation = 0.0;    // sup |Delta_h v - g| on {u > delta}

  double worst() const;
};

ResidualRecord residual_record(const ScalarField& u, const ScalarField& v, const ScalarField& f,
                               const ScalarField& g, double delta);

struct SolutionPair {
  ScalarField u;
  ScalarField v;
  ResidualRecord residuals;
  std::vector<IterationRecord> history;
  double epsFinal = 0.0;
  bool converged = false;  // fixed-point change criterion met at every eps
  bool accepted = false;   // converged and every residual <= acceptTol

  /// Plain-text key = value diagnostics record.
  std::string diagnostics() const;
};

/// Output of one application of T. Ordered as the map is written:
/// first the v-solve driven by u-bar, then the u-solve driven by v-bar.
struct TMapOutput {
  ScalarField v;
  ScalarField u;
  SolveReport vReport;
  SolveReport uReport;
  double uRelaxation = 0.0;  // relaxation factor the u-solve ended with
};

TMapOutput t_map(const ScalarField& uBar, const ScalarField& vBar, double eps, const ProblemSpec& spec,
                 const CoupledParams& params);

struct PenalizedResult {
  SolutionPair pair;
  int iterations = 0;
  double lastChangeU = 0.0;
  double lastChangeV = 0.0;
};

/// Picard iteration of T at fixed eps until both sup-changes fall below
/// `tol`. A run that exhausts `maxIters` returns with pair.converged == false
/// (FixedPointNonConvergence diagnostic) instead of throwing.
PenalizedResult solve_penalized(const ProblemSpec& spec, double eps, const CoupledParams& params,
                                double tol, int maxIters,
                                const std::optional<std::pair<ScalarField, ScalarField>>& warmStart =
                                    std::nullopt);

/// Warm-started continuation over the schedule; residuals evaluated with
/// delta = max(2 eps_final, h). With params.nested the coarse levels run the
/// schedule clamped to their own 2h^2 floor. History lists every level,
/// coarsest first; convergence refers to the finest level. Throws
/// FixedPointNonConvergence naming the failing eps when `throwOnFailure` is set.
SolutionPair solve_coupled(const ProblemSpec& spec, const PenalizationSchedule& schedule,
                           const CoupledParams& params, bool throwOnFailure = false);

}  // namespace ifb
