#include "ifb/infinity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "ifb/error.hpp"

namespace ifb {

namespace {

struct NodeEval {
  double residual;  // scheme residual at the node
  double diagonal;  // |d residual / d u_node|, the local Newton scale
  double grad2;     // |p|^2 of the centered gradient
};

// Raw-pointer stencil so the sweeps avoid per-node bounds checks.
//
// The scheme residual is the centered <H_h p_h, p_h> - f. At a discrete
// extremum (<= or >= all axis neighbours) a residual of the
// viscosity-admissible sign counts as zero once the operator along the
// steepest one-sided slope, s^2 D_ee, already reaches f. A flat plateau has
// s = 0, so it cannot sit under a positive source.
struct Stencil {
  explicit Stencil(const Grid& g)
      : dimension(g.dimension), stride(g.dims[0]), h(g.h), inv2h(0.5 / g.h), invh2(1.0 / (g.h * g.h)) {
    const std::ptrdiff_t st = static_cast<std::ptrdiff_t>(stride);
    const double diag = h * std::numbers::sqrt2;
    lines = dimension == 1 ? 1 : 4;
    const std::ptrdiff_t off[4] = {1, st, st + 1, st - 1};
    const double len[4] = {h, h, diag, diag};
    for (int k = 0; k < 4; ++k) {
      offsets[k] = off[k];
      lengths[k] = len[k];
    }
  }

  NodeEval operator()(const double* u, std::size_t n, double f) const {
    const double c = u[n];
    const double e = u[n + 1];
    const double w = u[n - 1];
    const double px = (e - w) * inv2h;
    const double uxx = (e - 2.0 * c + w) * invh2;
    bool lmin = c <= e && c <= w;
    bool lmax = c >= e && c >= w;
    double grad2 = px * px;
    double lap = grad2 * uxx;
    if (dimension == 2) {
      const double nn = u[n + stride];
      const double so = u[n - stride];
      const double py = (nn - so) * inv2h;
      const double uyy = (nn - 2.0 * c + so) * invh2;
      const double uxy =
          (u[n + stride + 1] - u[n + stride - 1] - u[n - stride + 1] + u[n - stride - 1]) * (0.25 * invh2);
      grad2 += py * py;
      lap += 2.0 * px * py * uxy + py * py * uyy;
      lmin = lmin && c <= nn && c <= so;
      lmax = lmax && c >= nn && c >= so;
    }
    const NodeEval centered{lap - f, 2.0 * grad2 * invh2, grad2};
    if (lmin && centered.residual < 0.0) return cusp(u, n, f, true, centered);
    if (lmax && centered.residual > 0.0) return cusp(u, n, f, false, centered);
    return centered;
  }

  NodeEval cusp(const double* u, std::size_t n, double f, bool isMin, const NodeEval& centered) const {
    const double c = u[n];
    const double sign = isMin ? 1.0 : -1.0;
    double s = 0.0;
    int best = 0;
    for (int k = 0; k < lines; ++k) {
      const double a = sign * (u[n + offsets[k]] - c);
      const double b = sign * (u[n - offsets[k]] - c);
      const double slope = std::max(a, b) / lengths[k];
      if (slope > s) {
        s = slope;
        best = k;
      }
    }
    const double d = lengths[best];
    const double second = (u[n + offsets[best]] - 2.0 * c + u[n - offsets[best]]) / (d * d);
    const double r = s * s * second - f;
    if (sign * r >= 0.0) return {0.0, centered.diagonal, centered.grad2};
    // d/du_c of s^2 * second: s moves by -sign/d, second by -2/d^2.
    const double diagonal = 2.0 * s * std::abs(second) / d + 2.0 * s * s / (d * d);
    return {r, diagonal, centered.grad2};
  }

  int dimension;
  std::size_t stride;
  double h;
  double inv2h;
  double invh2;
  int lines = 4;
  std::ptrdiff_t offsets[4]{};
  double lengths[4]{};
};

std::vector<std::size_t> interior_nodes(const Grid& g) {
  std::vector<std::size_t> nodes;
  nodes.reserve(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.is_interior(n)) nodes.push_back(n);
  }
  return nodes;
}

}  // namespace

void InfinitySolveParams::validate() const {
  if (!(pseudoTimeStep > 0.0)) throw Error(ErrorCode::BadParameter, "pseudo-time step must be positive");
  if (!(residualTol > 0.0)) throw Error(ErrorCode::BadParameter, "residual tolerance must be positive");
  if (!(gradientFloor >= 0.0)) throw Error(ErrorCode::BadParameter, "gradient floor must be nonnegative");
  if (maxIterations < 1) throw Error(ErrorCode::BadParameter, "maxIterations must be positive");
  if (!(overRelaxation > 0.0 && overRelaxation < 2.0)) {
    throw Error(ErrorCode::BadParameter, "over-relaxation must lie in (0,2)");
  }
  if (!(minRelaxation > 0.0 && minRelaxation <= overRelaxation)) {
    throw Error(ErrorCode::BadParameter, "minRelaxation must lie in (0, overRelaxation]");
  }
  if (stallWindow < 0) throw Error(ErrorCode::BadParameter, "stallWindow must be nonnegative");
}

double infinity_laplacian_at(const ScalarField& field, std::size_t node) {
  const Vec2 p = gradient_at(field, node);
  const SymMatrix2 m = hessian_at(field, node);
  return p[0] * p[0] * m.xx + 2.0 * p[0] * p[1] * m.xy + p[1] * p[1] * m.yy;
}

ScalarField infinity_residual(const ScalarField& field, const ScalarField& source) {
  require_same_grid(field, source);
  const Grid& g = field.grid();
  ScalarField out = ScalarField::constant(g, 0.0, FieldKind::residual);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.is_interior(n)) out[n] = infinity_laplacian_at(field, n) - source[n];
  }
  return out;
}

ScalarField infinity_scheme_residual_field(const ScalarField& field, const ScalarField& source) {
  require_same_grid(field, source);
  const Grid& g = field.grid();
  ScalarField out = ScalarField::constant(g, 0.0, FieldKind::residual);
  const double* u = field.values().data();
  const Stencil stencil(g);
  for (std::size_t n : interior_nodes(g)) out[n] = stencil(u, n, source[n]).residual;
  return out;
}

double infinity_scheme_residual(const ScalarField& field, const ScalarField& source) {
  require_same_grid(field, source);
  const Grid& g = field.grid();
  const double* u = field.values().data();
  const Stencil stencil(g);
  double worst = 0.0;
  for (std::size_t n : interior_nodes(g)) {
    worst = std::max(worst, std::abs(stencil(u, n, source[n]).residual));
  }
  return worst;
}

InfinitySolveResult solve_infinity_poisson(const Grid& grid, const ScalarField& source,
                                           const ScalarField& boundary,
                                           const InfinitySolveParams& params,
                                           const std::optional<ScalarField>& warmStart) {
  params.validate();
  if (!(source.grid() == grid) || !(boundary.grid() == grid)) {
    throw Error(ErrorCode::GridMismatch, "source and boundary must live on the solve grid");
  }
  const ScalarField start = initial_iterate(boundary, warmStart);
  ScalarField u = start;
  const std::vector<std::size_t> nodes = interior_nodes(grid);
  const double h2 = grid.h * grid.h;
  const double floor2 = params.gradientFloor * params.gradientFloor;
  const double* f = source.values().data();

  const Stencil stencil(grid);
  SolveReport report;
  double initialGrad2 = 0.0;
  double initialResidual = 0.0;
  for (std::size_t n : nodes) {
    const NodeEval ev = stencil(u.values().data(), n, f[n]);
    initialGrad2 = std::max(initialGrad2, ev.grad2);
    initialResidual = std::max(initialResidual, std::abs(ev.residual));
  }
  // The local step linearizes around the current gradient; when that
  // overshoots the sweep blows up and we restart with less over-relaxation.
  const double blowUp = 1e2 * (1.0 + initialResidual);
  double omega = params.overRelaxation;
  double maxGrad2 = initialGrad2;
  // Odd-even modes the centered stencil cannot see can lock the sweep into a
  // cycle; a stalled residual lowers omega, below 1 if need be.
  double bestResidual = initialResidual;
  int lastGain = 0;

  std::vector<double> next;
  if (params.relaxation == InfinityRelaxation::pseudo_time) next.assign(u.values().begin(), u.values().end());

  for (int it = 1; it <= params.maxIterations; ++it) {
    double* cur = u.values().data();
    double sweepMaxGrad2 = 0.0;
    double sweepResidual = 0.0;
    if (params.relaxation == InfinityRelaxation::pseudo_time) {
      const double tau = params.pseudoTimeStep * h2 / std::max(floor2, maxGrad2);
      for (std::size_t n : nodes) {
        const NodeEval ev = stencil(cur, n, f[n]);
        const double r = ev.residual;
        next[n] = cur[n] + tau * r;
        sweepMaxGrad2 = std::max(sweepMaxGrad2, ev.grad2);
        sweepResidual = std::max(sweepResidual, std::abs(r));
      }
      for (std::size_t n : nodes) cur[n] = next[n];
    } else {
      const double floorDiagonal = 2.0 * std::max(floor2, params.localFloor * maxGrad2) / h2;
      for (std::size_t n : nodes) {
        const NodeEval ev = stencil(cur, n, f[n]);
        const double r = ev.residual;
        cur[n] += omega * r / std::max(ev.diagonal, floorDiagonal);
        sweepMaxGrad2 = std::max(sweepMaxGrad2, ev.grad2);
        sweepResidual = std::max(sweepResidual, std::abs(r));
      }
    }
    maxGrad2 = sweepMaxGrad2;
    report.iterations = it;
    if (!(sweepResidual < blowUp)) {
      if (params.relaxation == InfinityRelaxation::pseudo_time || omega <= 1.0) {
        report.residual = sweepResidual;
        break;
      }
      omega = 1.0 + 0.5 * (omega - 1.0);
      u = start;
      maxGrad2 = initialGrad2;
      bestResidual = initialResidual;
      lastGain = it;
      continue;
    }
    if (sweepResidual < 0.98 * bestResidual) {
      bestResidual = sweepResidual;
      lastGain = it;
    } else if (params.stallWindow > 0 && it - lastGain >= params.stallWindow &&
               params.relaxation == InfinityRelaxation::local_sor) {
      omega = std::max(params.minRelaxation, omega > 1.0 ? 1.0 + 0.5 * (omega - 1.0) : 0.8 * omega);
      bestResidual = sweepResidual;
      lastGain = it;
    }
    // sweepResidual was taken before the updates; confirm on the settled field.
    if (it % params.checkEvery == 0 || it == params.maxIterations) {
      if (sweepResidual <= params.residualTol || it == params.maxIterations) {
        report.residual = infinity_scheme_residual(u, source);
        if (report.residual <= params.residualTol) {
          report.converged = true;
          break;
        }
      }
    }
  }
  return {std::move(u), report, omega};
}

}  // namespace ifb
