#include <doctest.h>

#include <cmath>

#include "ifb/error.hpp"
#include "ifb/laplace.hpp"

using namespace ifb;

namespace {

double interior_sup(const ScalarField& f) {
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (f.grid().is_interior(n)) s = std::max(s, std::abs(f[n]));
  }
  return s;
}

PointFunction quarter_r2() {
  return [](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]); };
}

}  // namespace

TEST_CASE("laplacian residual examples") {
  const Grid g = unit_box(2, 1.0 / 16.0);
  const ScalarField one = ScalarField::constant(g, 1.0);
  CHECK(interior_sup(laplacian_residual(sample(quarter_r2(), g), one)) < 1e-12);
  const ScalarField half = sample([](const Point& p) { return 0.5 * (p[0] * p[0] + p[1] * p[1]); }, g);
  const ScalarField r = laplacian_residual(half, one);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.is_interior(n)) CHECK(r[n] == doctest::Approx(1.0));
  }
  const Grid line = make_grid({-1.0}, {1.0}, 1.0 / 16.0);
  const ScalarField u1 = sample([](const Point& p) { return 0.5 * p[0] * p[0]; }, line);
  CHECK(interior_sup(laplacian_residual(u1, ScalarField::constant(line, 1.0))) < 1e-12);
}

TEST_CASE("poisson solver examples") {
  const Grid g = unit_box(2, 1.0 / 32.0);
  const SorParams params;
  const ScalarField x = sample([](const Point& p) { return p[0]; }, g);
  PoissonSolveResult r = solve_poisson(g, ScalarField::constant(g, 0.0), x, params);
  CHECK(r.report.converged);
  CHECK(sup_abs_difference(r.field, x) < 1e-6);

  const ScalarField q = sample(quarter_r2(), g);
  r = solve_poisson(g, ScalarField::constant(g, 1.0), q, params);
  CHECK(r.report.converged);
  CHECK(sup_abs_difference(r.field, q) < 1e-6);
  CHECK(interior_sup(laplacian_residual(r.field, ScalarField::constant(g, 1.0))) <= params.residualTol);

  const ScalarField h2 = sample([](const Point& p) { return 0.5 * (p[0] * p[0] + p[1] * p[1]); }, g);
  r = solve_poisson(g, ScalarField::constant(g, 2.0), h2, params);
  CHECK(sup_abs_difference(r.field, h2) < 1e-6);
}

TEST_CASE("optimal SOR factor") {
  const Grid g = unit_box(2, 1.0 / 32.0);
  const double w = optimal_sor_omega(g);
  CHECK(w > 1.0);
  CHECK(w < 2.0);
  CHECK(w == doctest::Approx(2.0 / (1.0 + std::sin(M_PI / 64.0))).epsilon(1e-12));
}

TEST_CASE("obstacle solver examples") {
  const Grid g = unit_box(2, 1.0 / 16.0);
  const PsorParams params;
  PoissonSolveResult r = solve_obstacle_psor(g, ScalarField::constant(g, 1.0), ScalarField::constant(g, 0.0), params);
  CHECK(r.report.converged);
  CHECK(r.field.max() == 0.0);
  CHECK(r.field.min() == 0.0);

  const Grid line = make_grid({-1.0}, {1.0}, 1.0 / 64.0);
  const ScalarField one = ScalarField::constant(line, 1.0);
  const ScalarField parabola = sample([](const Point& p) { return 0.5 * p[0] * p[0]; }, line);
  r = solve_obstacle_psor(line, one, parabola, params);
  CHECK(r.report.converged);
  CHECK(sup_abs_difference(r.field, parabola) < 1e-6);

  const ScalarField shifted = sample([](const Point& p) { return 0.5 * std::pow(std::max(p[0] - 0.5, 0.0), 2.0); }, line);
  r = solve_obstacle_psor(line, one, shifted, params);
  CHECK(r.report.converged);
  CHECK(sup_abs_difference(r.field, shifted) < 2.0 * line.h);
  CHECK(r.field.min() >= 0.0);
  // The free boundary sits within a cell of x = 1/2.
  double last = -1.0;
  for (std::size_t i = 0; i < line.dims[0]; ++i) {
    if (r.field[i] <= 1e-12) last = line.coord(i)[0];
  }
  CHECK(std::abs(last - 0.5) <= 1.5 * line.h);
  CHECK(complementarity_residual(r.field, one) <= 1e-6);
}

TEST_CASE("obstacle solver rejects a negative trace") {
  const Grid g = unit_box(2, 0.25);
  try {
    solve_obstacle_psor(g, ScalarField::constant(g, 1.0), ScalarField::constant(g, -0.5), PsorParams{});
    FAIL("expected NegativeBoundary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeBoundary);
  }
}

TEST_CASE("PSOR output does not depend on the relaxation factor") {
  const Grid g = unit_box(2, 1.0 / 16.0);
  const ScalarField f = sample([](const Point& p) { return 1.0 + 0.5 * p[0]; }, g);
  const ScalarField psi = sample([](const Point& p) { return std::max(p[0] + 0.3 * p[1], 0.0); }, g);
  std::vector<ScalarField> out;
  for (const double w : {1.0, 1.5, 1.9}) {
    PsorParams params;
    params.omega = w;
    params.residualTol = 1e-10;
    const PoissonSolveResult r = solve_obstacle_psor(g, f, psi, params);
    REQUIRE(r.report.converged);
    out.push_back(r.field);
  }
  CHECK(sup_abs_difference(out[0], out[1]) < 1e-8);
  CHECK(sup_abs_difference(out[0], out[2]) < 1e-8);
}

TEST_CASE("PSOR agrees with Poisson when the unconstrained solution is nonnegative") {
  const Grid g = unit_box(2, 1.0 / 16.0);
  const ScalarField one = ScalarField::constant(g, 1.0);
  const ScalarField psi = sample([](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]) + 0.1; }, g);
  const PsorParams params;
  const PoissonSolveResult a = solve_poisson(g, one, psi, params);
  const PoissonSolveResult b = solve_obstacle_psor(g, one, psi, params);
  REQUIRE(a.field.min() >= 0.0);
  CHECK(sup_abs_difference(a.field, b.field) < 1e-6);
}

TEST_CASE("discrete comparison for the obstacle problem") {
  const Grid g = unit_box(2, 1.0 / 16.0);
  const ScalarField psi = sample([](const Point& p) { return 0.3 * std::max(p[0], 0.0) + 0.1 * p[1] * p[1]; }, g);
  const ScalarField g1 = ScalarField::constant(g, 1.0);
  const ScalarField g2 = sample([](const Point& p) { return 1.5 + p[0] * p[0]; }, g);
  const PsorParams params;
  const PoissonSolveResult v1 = solve_obstacle_psor(g, g1, psi, params);
  const PoissonSolveResult v2 = solve_obstacle_psor(g, g2, psi, params);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(v1.field[n] >= v2.field[n] - params.residualTol);
}
