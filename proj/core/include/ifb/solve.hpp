#pragma once

// Pieces shared by the Dirichlet solvers: convergence reports and the way a
// boundary trace seeds and pins the iterate.

#include <optional>
#include <string>

#include "ifb/field.hpp"

namespace ifb {

/// Outcome of an iterative solve. A solve that runs out of iterations is
/// reported here (converged == false) rather than thrown, so callers may
/// retry with a smaller step or more iterations.
struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;

  std::string describe() const;
};

/// Copies the boundary nodes of `trace` into `field`.
void impose_boundary(ScalarField& field, const ScalarField& trace);

/// Transfinite (Coons) interpolation of the boundary trace into the interior;
/// linear interpolation of the two end values in 1D.
ScalarField interpolate_boundary(const ScalarField& trace);

/// Warm start when given, boundary interpolation otherwise; boundary pinned.
ScalarField initial_iterate(const ScalarField& trace, const std::optional<ScalarField>& warmStart);

}  // namespace ifb
