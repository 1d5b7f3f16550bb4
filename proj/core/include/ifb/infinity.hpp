#pragma once

// Unnormalized infinity Laplacian <D^2 w Dw, Dw> built from centered
// differences, and a relaxation solver for the Dirichlet problem
// Delta_inf u = source.

#include <optional>

#include "ifb/field.hpp"
#include "ifb/solve.hpp"

namespace ifb {

enum class InfinityRelaxation {
  /// Jacobi pseudo-time sweep with one global step
  /// tau0 * h^2 / max(gradientFloor^2, max_node |grad u|^2).
  pseudo_time,
  /// Gauss-Seidel sweep with the node-local Newton step r / |dL/du_node|
  /// (h^2 / (2 |grad u|^2) away from extrema), over-relaxed by `overRelaxation`.
  local_sor,
};

struct InfinitySolveParams {
  double pseudoTimeStep = 0.25;
  int maxIterations = 200000;
  double residualTol = 1e-6;
  double gradientFloor = 1e-8;
  InfinityRelaxation relaxation = InfinityRelaxation::local_sor;
  double overRelaxation = 1.8;
  /// local_sor only: node steps use max(|p|^2, localFloor * max |p|^2) so
  /// near-critical nodes fall back toward the global step.
  double localFloor = 1e-2;
  /// local_sor only: after this many sweeps without a 2% residual gain the
  /// relaxation factor is lowered, down to minRelaxation (0 disables).
  int stallWindow = 200;
  double minRelaxation = 0.3;
  /// Residual is measured every this many sweeps.
  int checkEvery = 10;

  void validate() const;
};

/// Delta_inf,h w at an interior node (1D: w'^2 w'').
double infinity_laplacian_at(const ScalarField& field, std::size_t node);

/// Delta_inf,h w - source at interior nodes, zero on the boundary.
ScalarField infinity_residual(const ScalarField& field, const ScalarField& source);

/// Sup over interior nodes of the residual the solver drives to zero. It
/// equals infinity_residual except at discrete extrema (a node <= or >= all
/// axis neighbours). There the centered gradient cancels, and a residual of
/// the viscosity-admissible sign counts as zero once the operator along the
/// steepest one-sided slope has reached the source.
double infinity_scheme_residual(const ScalarField& field, const ScalarField& source);
ScalarField infinity_scheme_residual_field(const ScalarField& field, const ScalarField& source);

struct InfinitySolveResult {
  ScalarField field;
  SolveReport report;
  /// Relaxation factor in use when the solve stopped.
  double overRelaxation = 0.0;
};

/// Returned field equals `boundary` on boundary nodes. Non-convergence is
/// reported, not thrown.
InfinitySolveResult solve_infinity_poisson(const Grid& grid, const ScalarField& source,
                                           const ScalarField& boundary,
                                           const InfinitySolveParams& params,
                                           const std::optional<ScalarField>& warmStart = std::nullopt);

}  // namespace ifb
