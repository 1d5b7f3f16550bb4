#include "ifb/solve.hpp"

#include <cstdio>

#include "ifb/error.hpp"

namespace ifb {

std::string SolveReport::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s after %d iterations, residual %.3e",
                converged ? "converged" : "NonConvergence", iterations, residual);
  return buf;
}

void impose_boundary(ScalarField& field, const ScalarField& trace) {
  require_same_grid(field, trace);
  const Grid& g = field.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.is_boundary(n)) field[n] = trace[n];
  }
}

ScalarField interpolate_boundary(const ScalarField& trace) {
  const Grid& g = trace.grid();
  ScalarField out = trace;
  const std::size_t nx = g.dims[0] - 1;
  if (g.dimension == 1) {
    for (std::size_t i = 1; i < nx; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(nx);
      out[i] = (1.0 - s) * trace.at(0) + s * trace.at(nx);
    }
    return out;
  }
  const std::size_t ny = g.dims[1] - 1;
  for (std::size_t j = 1; j < ny; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(ny);
    for (std::size_t i = 1; i < nx; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(nx);
      const double edges = (1.0 - s) * trace.at(0, j) + s * trace.at(nx, j) +
                           (1.0 - t) * trace.at(i, 0) + t * trace.at(i, ny);
      const double corners = (1.0 - s) * (1.0 - t) * trace.at(0, 0) + s * (1.0 - t) * trace.at(nx, 0) +
                             (1.0 - s) * t * trace.at(0, ny) + s * t * trace.at(nx, ny);
      out[g.node(i, j)] = edges - corners;
    }
  }
  return out;
}

ScalarField initial_iterate(const ScalarField& trace, const std::optional<ScalarField>& warmStart) {
  ScalarField out = warmStart ? *warmStart : interpolate_boundary(trace);
  require_same_grid(out, trace);
  impose_boundary(out, trace);
  out.set_kind(FieldKind::solution);
  return out;
}

}  // namespace ifb
