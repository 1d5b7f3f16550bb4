#include "ifb/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ifb/error.hpp"

namespace ifb {

double beta_eps(double s, double eps) {
  const double t = s / eps;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

void ProblemSpec::validate(bool requireNondegenerate) const {
  for (const ScalarField* field : {&f, &g, &phi, &psi}) {
    if (!(field->grid() == grid)) throw Error(ErrorCode::GridMismatch, "problem data must share the grid");
    if (!field->all_finite()) throw Error(ErrorCode::NonFiniteSample, "problem data contains NaN/Inf");
  }
  if (requireNondegenerate) {
    const double lower = std::min(f.min(), g.min());
    if (lower < c0Check) {
      throw Error(ErrorCode::HypothesisViolation,
                  "min(f,g) = " + std::to_string(lower) + " is below c0 = " + std::to_string(c0Check));
    }
  }
}

void PenalizationSchedule::validate(const Grid& grid) const {
  if (eps.empty()) throw Error(ErrorCode::ValidationError, "schedule needs at least one eps");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw Error(ErrorCode::ValidationError, "eps values must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw Error(ErrorCode::ValidationError, "eps values must be strictly decreasing");
    }
  }
  const double floor = 2.0 * grid.h * grid.h;
  if (eps.back() < floor) {
    throw Error(ErrorCode::ValidationError,
                "final eps " + std::to_string(eps.back()) + " is below the resolvable floor 2h^2 = " +
                    std::to_string(floor));
  }
  if (!(perEpsilonTol > 0.0)) throw Error(ErrorCode::ValidationError, "perEpsilonTol must be positive");
  if (fixedPointMaxIters < 1) throw Error(ErrorCode::ValidationError, "fixedPointMaxIters must be positive");
}

double ResidualRecord::worst() const { return std::max({uInequality, uEquation, vInequality, vEquation}); }

ResidualRecord residual_record(const ScalarField& u, const ScalarField& v, const ScalarField& f,
                               const ScalarField& g, double delta) {
  require_same_grid(u, v);
  require_same_grid(u, f);
  require_same_grid(u, g);
  const ScalarField ru = infinity_residual(u, f);
  const ScalarField rv = laplacian_residual(v, g);
  const Grid& grid = u.grid();
  ResidualRecord rec;
  rec.delta = delta;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (grid.is_boundary(n)) continue;
    rec.uInequality = std::max(rec.uInequality, ru[n]);
    rec.vInequality = std::max(rec.vInequality, rv[n]);
    if (v[n] > delta) rec.uEquation = std::max(rec.uEquation, std::abs(ru[n]));
    if (u[n] > delta) rec.vEquation = std::max(rec.vEquation, std::abs(rv[n]));
  }
  return rec;
}

std::string SolutionPair::diagnostics() const {
  std::ostringstream out;
  char buf[160];
  auto line = [&](const char* key, double value) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, value);
    out << buf;
  };
  out << "converged = " << (converged ? "true" : "false") << "\n";
  out << "accepted = " << (accepted ? "true" : "false") << "\n";
  line("eps_final", epsFinal);
  line("delta", residuals.delta);
  line("residual_u_inequality", residuals.uInequality);
  line("residual_u_equation", residuals.uEquation);
  line("residual_v_inequality", residuals.vInequality);
  line("residual_v_equation", residuals.vEquation);
  out << "picard_iterations = " << history.size() << "\n";
  long uSweeps = 0;
  long vSweeps = 0;
  for (const auto& h : history) {
    uSweeps += h.uSweeps;
    vSweeps += h.vSweeps;
  }
  out << "u_sweeps = " << uSweeps << "\n";
  out << "v_sweeps = " << vSweeps << "\n";
  return out.str();
}

namespace {

ScalarField penalized_source(const ScalarField& weight, const ScalarField& driver, double eps) {
  ScalarField out = weight;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = weight[n] * beta_eps(driver[n], eps);
  out.set_kind(FieldKind::source);
  return out;
}

}  // namespace

namespace detail {

TMapOutput t_map_warm(const ScalarField& uBar, const ScalarField& vBar, double eps, const ProblemSpec& spec,
                      const CoupledParams& params, const std::optional<ScalarField>& uStart,
                      const std::optional<ScalarField>& vStart) {
  if (!(eps > 0.0)) throw Error(ErrorCode::BadParameter, "eps must be positive");
  if (!(uBar.grid() == spec.grid) || !(vBar.grid() == spec.grid)) {
    throw Error(ErrorCode::GridMismatch, "iterates must live on the problem grid");
  }
  const ScalarField vSource = penalized_source(spec.g, uBar, eps);
  const ScalarField uSource = penalized_source(spec.f, vBar, eps);
  PoissonSolveResult vSolve = solve_poisson(spec.grid, vSource, spec.psi, params.poisson, vStart);
  InfinitySolveResult uSolve = solve_infinity_poisson(spec.grid, uSource, spec.phi, params.infinity, uStart);
  return {std::move(vSolve.field), std::move(uSolve.field), vSolve.report, uSolve.report, uSolve.overRelaxation};
}

}  // namespace detail

TMapOutput t_map(const ScalarField& uBar, const ScalarField& vBar, double eps, const ProblemSpec& spec,
                 const CoupledParams& params) {
  return detail::t_map_warm(uBar, vBar, eps, spec, params, uBar, vBar);
}

PenalizedResult solve_penalized(const ProblemSpec& spec, double eps, const CoupledParams& params, double tol,
                                int maxIters,
                                const std::optional<std::pair<ScalarField, ScalarField>>& warmStart) {
  spec.validate();
  if (!(params.damping > 0.0 && params.damping <= 1.0)) {
    throw Error(ErrorCode::BadParameter, "damping must lie in (0,1]");
  }
  ScalarField u = warmStart ? warmStart->first : initial_iterate(spec.phi, std::nullopt);
  ScalarField v = warmStart ? warmStart->second : initial_iterate(spec.psi, std::nullopt);
  impose_boundary(u, spec.phi);
  impose_boundary(v, spec.psi);

  CoupledParams capped = params;
  if (params.innerSweepCap > 0) {
    capped.infinity.maxIterations = std::min(capped.infinity.maxIterations, params.innerSweepCap);
    capped.poisson.maxIterations = std::min(capped.poisson.maxIterations, params.innerSweepCap);
  }

  PenalizedResult result;
  for (int k = 1; k <= maxIters; ++k) {
    TMapOutput next = detail::t_map_warm(u, v, eps, spec, capped, u, v);
    const bool innerConverged = next.uReport.converged && next.vReport.converged;
    // Keep any relaxation an unconverged u-solve had to give up; the cycle it
    // broke would otherwise reappear on the next Picard step.
    capped.infinity.overRelaxation =
        next.uReport.converged ? params.infinity.overRelaxation : next.uRelaxation;
    if (params.damping < 1.0) {
      for (std::size_t n = 0; n < u.size(); ++n) {
        next.u[n] = params.damping * next.u[n] + (1.0 - params.damping) * u[n];
        next.v[n] = params.damping * next.v[n] + (1.0 - params.damping) * v[n];
      }
    }
    result.lastChangeU = sup_abs_difference(next.u, u);
    result.lastChangeV = sup_abs_difference(next.v, v);
    result.iterations = k;
    result.pair.history.push_back(
        {eps, spec.grid.h, k, result.lastChangeU, result.lastChangeV, next.uReport.iterations, next.vReport.iterations,
         innerConverged});
    if (params.onIteration) params.onIteration(result.pair.history.back());
    u = std::move(next.u);
    v = std::move(next.v);
    if (!std::isfinite(result.lastChangeU) || !std::isfinite(result.lastChangeV)) break;
    if (innerConverged && result.lastChangeU < tol && result.lastChangeV < tol) {
      result.pair.converged = true;
      break;
    }
  }
  const double delta = std::max(2.0 * eps, spec.grid.h);
  result.pair.residuals = residual_record(u, v, spec.f, spec.g, delta);
  result.pair.epsFinal = eps;
  result.pair.accepted = result.pair.converged && result.pair.residuals.worst() <= params.acceptTol;
  u.set_kind(FieldKind::solution);
  v.set_kind(FieldKind::solution);
  result.pair.u = std::move(u);
  result.pair.v = std::move(v);
  return result;
}

namespace {

ProblemSpec coarse_spec(const ProblemSpec& spec) {
  const Grid coarse = coarsen(spec.grid);
  return {coarse,
          resample(spec.f, coarse),
          resample(spec.g, coarse),
          resample(spec.phi, coarse),
          resample(spec.psi, coarse),
          spec.c0Check};
}

// The fine schedule clamped to the coarse floor 2 (2h)^2, duplicates dropped.
std::vector<double> coarse_schedule(const std::vector<double>& eps, double coarseH) {
  const double floor = 2.0 * coarseH * coarseH;
  std::vector<double> out;
  for (double e : eps) {
    const double clamped = std::max(e, floor);
    if (out.empty() || clamped < out.back()) out.push_back(clamped);
  }
  return out;
}

}  // namespace

SolutionPair solve_coupled(const ProblemSpec& spec, const PenalizationSchedule& schedule,
                           const CoupledParams& params, bool throwOnFailure) {
  spec.validate();
  schedule.validate(spec.grid);
  std::optional<std::pair<ScalarField, ScalarField>> warm;
  std::vector<IterationRecord> history;
  std::vector<double> fineEps = schedule.eps;
  if (params.nested && can_coarsen(spec.grid, params.coarsestCells)) {
    const ProblemSpec coarse = coarse_spec(spec);
    PenalizationSchedule coarseSchedule = schedule;
    coarseSchedule.eps = coarse_schedule(schedule.eps, coarse.grid.h);
    const SolutionPair start = solve_coupled(coarse, coarseSchedule, params, false);
    history = start.history;
    warm = std::make_pair(resample(start.u, spec.grid), resample(start.v, spec.grid));
    // The coarse level already followed the schedule down to its own floor;
    // the fine level resumes from there.
    const double reached = coarseSchedule.eps.back();
    fineEps.clear();
    for (double e : schedule.eps) {
      if (e <= reached) fineEps.push_back(e);
    }
  }
  SolutionPair out;
  bool allConverged = true;
  for (double eps : fineEps) {
    PenalizedResult step =
        solve_penalized(spec, eps, params, schedule.perEpsilonTol, schedule.fixedPointMaxIters, warm);
    history.insert(history.end(), step.pair.history.begin(), step.pair.history.end());
    if (!step.pair.converged) {
      allConverged = false;
      if (throwOnFailure) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "eps = %g: last changes |du| = %.3e, |dv| = %.3e after %d iterations",
                      eps, step.lastChangeU, step.lastChangeV, step.iterations);
        throw Error(ErrorCode::FixedPointNonConvergence, buf);
      }
    }
    warm = std::make_pair(step.pair.u, step.pair.v);
    out = std::move(step.pair);
  }
  out.history = std::move(history);
  out.converged = allConverged;
  out.accepted = allConverged && out.residuals.worst() <= params.acceptTol;
  return out;
}

}  // namespace ifb
