#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ifb/error.hpp"
#include "ifb/field.hpp"

using namespace ifb;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::BadParameter;
}

}  // namespace

TEST_CASE("make_grid counts nodes") {
  const Grid g = make_grid({-1.0, -1.0}, {1.0, 1.0}, 0.5);
  CHECK(g.dims[0] == 5);
  CHECK(g.dims[1] == 5);
  CHECK(g.dimension == 2);

  const Grid line = make_grid({-1.0}, {1.0}, 1.0);
  CHECK(line.dimension == 1);
  CHECK(line.dims[0] == 3);
  CHECK(line.size() == 3);

  CHECK(code_of([] { make_grid({0.0, 0.0}, {1.0, 1.0}, 0.3); }) == ErrorCode::NonDivisibleExtent);
}

TEST_CASE("grid extent matches the node count") {
  for (const double h : {0.5, 0.25, 1.0 / 64.0, 1.0 / 128.0}) {
    const Grid g = unit_box(2, h);
    for (int k = 0; k < 2; ++k) {
      CHECK(g.hi[k] - g.lo[k] == doctest::Approx(h * static_cast<double>(g.dims[k] - 1)).epsilon(1e-14));
      CHECK(g.dims[k] >= 3);
    }
  }
}

TEST_CASE("sample") {
  const Grid g = unit_box(2, 0.25);
  const ScalarField zero = sample([](const Point&) { return 0.0; }, g);
  CHECK(zero.min() == 0.0);
  CHECK(zero.max() == 0.0);

  const ScalarField x = sample([](const Point& p) { return p[0]; }, make_grid({-1.0}, {1.0}, 1.0));
  CHECK(x[0] == -1.0);
  CHECK(x[1] == 0.0);
  CHECK(x[2] == 1.0);

  const ScalarField q = sample([](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]); }, g);
  CHECK(q.at(0, 0) == doctest::Approx(0.5));
  CHECK(q.values().size() == g.size());

  CHECK(code_of([&] { sample([](const Point&) { return std::nan(""); }, g); }) == ErrorCode::NonFiniteSample);
}

TEST_CASE("gradient_at and hessian_at") {
  const Grid g = unit_box(2, 0.25);
  const ScalarField lin = sample([](const Point& p) { return p[0]; }, g);
  const ScalarField c = ScalarField::constant(g, 3.0);
  const ScalarField q = sample([](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]); }, g);
  const ScalarField mixed = sample([](const Point& p) { return 0.5 * p[0] * p[1]; }, g);
  const std::size_t n = g.node(6, 4);  // (0.5, 0)

  const Vec2 gl = gradient_at(lin, n);
  CHECK(gl[0] == doctest::Approx(1.0));
  CHECK(gl[1] == doctest::Approx(0.0));
  const Vec2 gc = gradient_at(c, n);
  CHECK(gc[0] == 0.0);
  CHECK(gc[1] == 0.0);
  const Vec2 gq = gradient_at(q, n);
  CHECK(gq[0] == doctest::Approx(0.25));
  CHECK(gq[1] == doctest::Approx(0.0));

  const SymMatrix2 hq = hessian_at(q, n);
  CHECK(hq.xx == doctest::Approx(0.5));
  CHECK(hq.yy == doctest::Approx(0.5));
  CHECK(hq.xy == doctest::Approx(0.0));
  CHECK(hessian_at(mixed, n).xy == doctest::Approx(0.5));
  const SymMatrix2 hl = hessian_at(lin, n);
  CHECK(hl.xx == doctest::Approx(0.0));
  CHECK(hl.xy == doctest::Approx(0.0));

  CHECK(code_of([&] { gradient_at(q, g.node(0, 3)); }) == ErrorCode::BoundaryNode);
  CHECK(code_of([&] { hessian_at(q, g.node(8, 8)); }) == ErrorCode::BoundaryNode);
}

TEST_CASE("difference stencils are exact on random quadratics") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const Grid g = unit_box(2, 1.0 / 16.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng), e = coef(rng), f = coef(rng);
    const ScalarField q = sample([&](const Point& p) {
      return a * p[0] * p[0] + b * p[0] * p[1] + c * p[1] * p[1] + d * p[0] + e * p[1] + f;
    }, g);
    for (std::size_t n = 0; n < g.size(); n += 7) {
      if (g.is_boundary(n)) continue;
      const Point p = g.coord(n);
      const Vec2 grad = gradient_at(q, n);
      const SymMatrix2 hess = hessian_at(q, n);
      CHECK(grad[0] == doctest::Approx(2 * a * p[0] + b * p[1] + d).epsilon(1e-9));
      CHECK(grad[1] == doctest::Approx(b * p[0] + 2 * c * p[1] + e).epsilon(1e-9));
      CHECK(hess.xx == doctest::Approx(2 * a).epsilon(1e-9));
      CHECK(hess.xy == doctest::Approx(b).epsilon(1e-9));
      CHECK(hess.yy == doctest::Approx(2 * c).epsilon(1e-9));
    }
  }
}

TEST_CASE("sup_on_ball") {
  const Grid g = unit_box(2, 0.25);
  const ScalarField q = sample([](const Point& p) { return 0.25 * (p[0] * p[0] + p[1] * p[1]); }, g);
  CHECK(sup_on_ball(q, {{0.0, 0.0}, 0.5}) == doctest::Approx(0.0625));
  CHECK(sup_on_ball(ScalarField::constant(g, 2.5), {{0.3, -0.2}, 0.7}) == 2.5);

  const Grid line = make_grid({-1.0}, {1.0}, 0.25);
  const ScalarField x = sample([](const Point& p) { return p[0]; }, line);
  CHECK(sup_on_ball(x, {{0.0, 0.0}, 1.0}) == 1.0);

  CHECK(code_of([&] { sup_on_ball(q, {{0.1, 0.1}, 0.01}); }) == ErrorCode::EmptyBall);
}

TEST_CASE("sup_on_ball is monotone in the radius") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const Grid g = unit_box(2, 1.0 / 32.0);
  ScalarField f = ScalarField::constant(g, 0.0);
  for (double& x : f.values()) x = val(rng);
  for (int trial = 0; trial < 20; ++trial) {
    const Point c{0.5 * val(rng), 0.5 * val(rng)};
    double prev = -1e300;
    for (double r = 0.05; r < 0.5; r += 0.05) {
      const double s = sup_on_ball(f, {c, r});
      CHECK(s >= prev);
      prev = s;
    }
  }
}

TEST_CASE("intrinsic_norm") {
  const Grid g = unit_box(2, 0.25);
  const ScalarField zero = ScalarField::constant(g, 0.0);
  CHECK(intrinsic_norm(zero, zero).max() == 0.0);
  const ScalarField w = intrinsic_norm(ScalarField::constant(g, 1.0), ScalarField::constant(g, 8.0));
  CHECK(w.min() == doctest::Approx(3.0));
  CHECK(w.max() == doctest::Approx(3.0));

  ScalarField v = zero;
  v[g.node(4, 4)] = -0.1;
  CHECK(code_of([&] { intrinsic_norm(zero, v, 1e-6); }) == ErrorCode::NegativityViolation);
  v[g.node(4, 4)] = -1e-9;
  CHECK(intrinsic_norm(zero, v, 1e-6).max() == 0.0);
}

TEST_CASE("intrinsic_norm is monotone and vanishes only where both inputs do") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  const Grid g = unit_box(2, 0.125);
  ScalarField u = ScalarField::constant(g, 0.0);
  ScalarField v = ScalarField::constant(g, 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    u[n] = n % 3 == 0 ? 0.0 : val(rng);
    v[n] = n % 5 == 0 ? 0.0 : val(rng);
  }
  ScalarField u2 = u;
  ScalarField v2 = v;
  for (std::size_t n = 0; n < g.size(); ++n) {
    u2[n] += 0.1 * val(rng);
    v2[n] += 0.1 * val(rng);
  }
  const ScalarField w = intrinsic_norm(u, v);
  const ScalarField wu = intrinsic_norm(u2, v);
  const ScalarField wv = intrinsic_norm(u, v2);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(wu[n] >= w[n]);
    CHECK(wv[n] >= w[n]);
    CHECK((w[n] == 0.0) == (u[n] == 0.0 && v[n] == 0.0));
  }
}

TEST_CASE("coarsen and resample") {
  const Grid fine = unit_box(2, 1.0 / 16.0);
  REQUIRE(can_coarsen(fine));
  const Grid coarse = coarsen(fine);
  CHECK(coarse.h == doctest::Approx(1.0 / 8.0));
  CHECK(coarse.dims[0] == 17);
  const ScalarField lin = sample([](const Point& p) { return 2.0 * p[0] - p[1] + 0.5; }, coarse);
  const ScalarField up = resample(lin, fine);
  const ScalarField exact = sample([](const Point& p) { return 2.0 * p[0] - p[1] + 0.5; }, fine);
  CHECK(sup_abs_difference(up, exact) < 1e-12);
  CHECK_FALSE(can_coarsen(make_grid({0.0, 0.0}, {0.75, 0.75}, 0.25)));
  CHECK(code_of([] { coarsen(make_grid({0.0, 0.0}, {0.75, 0.75}, 0.25)); }) == ErrorCode::BadParameter);
}

TEST_CASE("field dumps") {
  const Grid g = unit_box(2, 0.5);
  const ScalarField q = sample([](const Point& p) { return p[0] + 2.0 * p[1]; }, g);
  std::ostringstream csv;
  write_csv(q, csv);
  CHECK(csv.str().rfind("x,y,value\n", 0) == 0);
  std::ostringstream pgm;
  write_pgm(q, pgm);
  CHECK(pgm.str().rfind("P2", 0) == 0);
}
