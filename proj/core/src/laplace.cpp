#include "ifb/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ifb/error.hpp"

namespace ifb {

namespace {

void check_inputs(const Grid& grid, const ScalarField& source, const ScalarField& boundary) {
  if (!(source.grid() == grid) || !(boundary.grid() == grid)) {
    throw Error(ErrorCode::GridMismatch, "source and boundary must live on the solve grid");
  }
}

// Sum of axis neighbours and the neighbour count factor.
inline double neighbour_sum(const double* v, std::size_t n, int dimension, std::size_t stride) {
  double s = v[n + 1] + v[n - 1];
  if (dimension == 2) s += v[n + stride] + v[n - stride];
  return s;
}

}  // namespace

void SorParams::validate() const {
  if (omega != 0.0 && !(omega > 0.0 && omega < 2.0)) {
    throw Error(ErrorCode::BadParameter, "SOR relaxation must lie in (0,2)");
  }
  if (!(residualTol > 0.0)) throw Error(ErrorCode::BadParameter, "residual tolerance must be positive");
  if (maxIterations < 1) throw Error(ErrorCode::BadParameter, "maxIterations must be positive");
}

double optimal_sor_omega(const Grid& grid) {
  const double extent = std::max(grid.hi[0] - grid.lo[0], grid.dimension == 2 ? grid.hi[1] - grid.lo[1] : 0.0);
  return 2.0 / (1.0 + std::sin(std::numbers::pi * grid.h / extent));
}

double laplacian_at(const ScalarField& field, std::size_t node) {
  const Grid& g = field.grid();
  if (node >= g.size() || g.is_boundary(node)) {
    throw Error(ErrorCode::BoundaryNode, "Laplacian needs an interior node");
  }
  const double* v = field.values().data();
  const double k = 2.0 * g.dimension;
  return (neighbour_sum(v, node, g.dimension, g.dims[0]) - k * v[node]) / (g.h * g.h);
}

ScalarField laplacian_residual(const ScalarField& field, const ScalarField& source) {
  require_same_grid(field, source);
  const Grid& g = field.grid();
  ScalarField out = ScalarField::constant(g, 0.0, FieldKind::residual);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.is_interior(n)) out[n] = laplacian_at(field, n) - source[n];
  }
  return out;
}

PoissonSolveResult solve_poisson(const Grid& grid, const ScalarField& source, const ScalarField& boundary,
                                 const SorParams& params, const std::optional<ScalarField>& warmStart) {
  params.validate();
  check_inputs(grid, source, boundary);
  ScalarField v = initial_iterate(boundary, warmStart);
  const double omega = params.omega == 0.0 ? optimal_sor_omega(grid) : params.omega;
  const double h2 = grid.h * grid.h;
  const double k = 2.0 * grid.dimension;
  const std::size_t stride = grid.dims[0];
  const std::size_t ny = grid.dimension == 2 ? grid.dims[1] - 1 : 2;
  const std::size_t jStart = grid.dimension == 2 ? 1 : 0;
  const std::size_t jEnd = grid.dimension == 2 ? ny : 1;
  const double* f = source.values().data();
  double* x = v.values().data();

  SolveReport report;
  for (int it = 1; it <= params.maxIterations; ++it) {
    for (std::size_t colour = 0; colour < 2; ++colour) {
      for (std::size_t j = jStart; j < jEnd; ++j) {
        std::size_t i = 1 + ((j + 1 + colour) % 2);
        for (; i + 1 < grid.dims[0]; i += 2) {
          const std::size_t n = i + stride * j;
          const double gs = (neighbour_sum(x, n, grid.dimension, stride) - h2 * f[n]) / k;
          x[n] += omega * (gs - x[n]);
        }
      }
    }
    report.iterations = it;
    if (it % params.checkEvery == 0 || it == params.maxIterations) {
      report.residual = sup_norm(laplacian_residual(v, source).values());
      if (report.residual <= params.residualTol) {
        report.converged = true;
        break;
      }
      if (!std::isfinite(report.residual)) break;
    }
  }
  return {std::move(v), report};
}

double complementarity_residual(const ScalarField& v, const ScalarField& g) {
  require_same_grid(v, g);
  const Grid& grid = v.grid();
  double worst = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (grid.is_boundary(n)) continue;
    const double slack = g[n] - laplacian_at(v, n);
    worst = std::max({worst, std::abs(std::min(v[n], slack)), std::max(-slack, 0.0)});
  }
  return worst;
}

PoissonSolveResult solve_obstacle_psor(const Grid& grid, const ScalarField& source,
                                       const ScalarField& boundary, const PsorParams& params,
                                       const std::optional<ScalarField>& warmStart) {
  params.validate();
  check_inputs(grid, source, boundary);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (grid.is_boundary(n) && boundary[n] < 0.0) {
      throw Error(ErrorCode::NegativeBoundary, "obstacle boundary data must be nonnegative");
    }
  }
  ScalarField v = initial_iterate(boundary, warmStart);
  for (double& x : v.values()) x = std::max(x, 0.0);
  const double omega = params.omega == 0.0 ? optimal_sor_omega(grid) : params.omega;
  const double h2 = grid.h * grid.h;
  const double k = 2.0 * grid.dimension;
  const std::size_t stride = grid.dims[0];
  const double* f = source.values().data();
  double* x = v.values().data();

  SolveReport report;
  for (int it = 1; it <= params.maxIterations; ++it) {
    for (std::size_t n = 0; n < grid.size(); ++n) {
      if (grid.is_boundary(n)) continue;
      const double gs = (neighbour_sum(x, n, grid.dimension, stride) - h2 * f[n]) / k;
      x[n] = std::max(0.0, x[n] + omega * (gs - x[n]));
    }
    report.iterations = it;
    if (it % params.checkEvery == 0 || it == params.maxIterations) {
      report.residual = complementarity_residual(v, source);
      if (report.residual <= params.residualTol) {
        report.converged = true;
        break;
      }
      if (!std::isfinite(report.residual)) break;
    }
  }
  return {std::move(v), report};
}

}  // namespace ifb
