#pragma once

// Five-point (three-point in 1D) Laplacian, a red-black SOR Poisson solver
// and projected SOR for the zero-obstacle problem
//   v >= 0,  Delta v <= g,  (g - Delta v) v = 0.

#include <optional>

#include "ifb/field.hpp"
#include "ifb/solve.hpp"

namespace ifb {

struct SorParams {
  /// 0 selects the model-problem optimum 2 / (1 + sin(pi h / L)).
  double omega = 0.0;
  int maxIterations = 100000;
  double residualTol = 1e-8;
  int checkEvery = 10;

  void validate() const;
};

using PsorParams = SorParams;

/// Optimal SOR factor for the Dirichlet Laplacian on this grid.
double optimal_sor_omega(const Grid& grid);

double laplacian_at(const ScalarField& field, std::size_t node);

/// Delta_h w - source at interior nodes, zero on the boundary.
ScalarField laplacian_residual(const ScalarField& field, const ScalarField& source);

struct PoissonSolveResult {
  ScalarField field;
  SolveReport report;
};

PoissonSolveResult solve_poisson(const Grid& grid, const ScalarField& source, const ScalarField& boundary,
                                 const SorParams& params,
                                 const std::optional<ScalarField>& warmStart = std::nullopt);

/// Sup over interior nodes of max(|min(v, g - Delta_h v)|, (Delta_h v - g)_+).
double complementarity_residual(const ScalarField& v, const ScalarField& g);

/// Lexicographic Gauss-Seidel step followed by projection onto v >= 0.
/// NegativeBoundary when the boundary trace dips below zero.
PoissonSolveResult solve_obstacle_psor(const Grid& grid, const ScalarField& source,
                                       const ScalarField& boundary, const PsorParams& params,
                                       const std::optional<ScalarField>& warmStart = std::nullopt);

}  // namespace ifb
