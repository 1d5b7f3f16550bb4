#include <doctest.h>

#include <cmath>
#include <random>

#include "ifb/error.hpp"
#include "ifb/exact.hpp"
#include "ifb/infinity.hpp"
#include "ifb/laplace.hpp"

using namespace ifb;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::BadParameter;
}

// Sixth-order central second difference.
double second_derivative(auto&& fn, double t, double d) {
  return (2.0 * fn(t - 3 * d) - 27.0 * fn(t - 2 * d) + 270.0 * fn(t - d) - 490.0 * fn(t) + 270.0 * fn(t + d) -
          27.0 * fn(t + 2 * d) + 2.0 * fn(t + 3 * d)) /
         (180.0 * d * d);
}

}  // namespace

TEST_CASE("growth coefficient") {
  const double c = growth_coefficient();
  CHECK(c == doctest::Approx(std::cbrt(81.0) / 4.0).epsilon(1e-15));
  CHECK(c * c * c * 64.0 / 81.0 == doctest::Approx(1.0).epsilon(1e-14));
  // (c t^{4/3})'^2 (c t^{4/3})'' at a few t.
  for (const double t : {0.1, 0.5, 0.9}) {
    const double d1 = c * 4.0 / 3.0 * std::cbrt(t);
    const double d2 = c * 4.0 / 9.0 / std::cbrt(t * t);
    CHECK(d1 * d1 * d2 == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("C_alpha") {
  CHECK(c_alpha(1.0) == 6.0);
  CHECK(c_alpha(0.0) == 2.0);
  CHECK(c_alpha(0.5) == doctest::Approx(3.75));
}

TEST_CASE("C_alpha reproduces the second derivative of t^{2+alpha}") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> alphaDist(0.1, 3.0);
  std::uniform_real_distribution<double> tDist(0.2, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double alpha = alphaDist(rng);
    const double t = tDist(rng);
    const auto fn = [alpha](double s) { return std::pow(s, 2.0 + alpha); };
    const double fd = second_derivative(fn, t, 1e-3);
    const double exact = c_alpha(alpha) * std::pow(t, alpha);
    CHECK(std::abs(fd - exact) / exact <= 1e-6);
  }
}

TEST_CASE("the coefficient 81/64 fails the radial oracle") {
  ExactPair wrong = example_radial();
  wrong.u = [](const Point& p) { return 81.0 / 64.0 * std::pow(std::hypot(p[0], p[1]), 4.0 / 3.0); };
  CHECK(code_of([&] { verify_example(wrong, unit_box(2, 1.0 / 32.0)); }) == ErrorCode::OracleFailure);
}

TEST_CASE("radial pair") {
  const ExactPair pair = example_radial();
  CHECK(pair.u({0.0, 0.0}) == 0.0);
  CHECK(pair.v({0.0, 0.0}) == 0.0);
  CHECK(pair.v({0.6, 0.8}) == doctest::Approx(0.25));
  CHECK(pair.u({0.6, 0.8}) == doctest::Approx(growth_coefficient()));
  CHECK(pair.f({0.3, -0.2}) == 1.0);
  CHECK(pair.g({0.3, -0.2}) == 1.0);
  CHECK(pair.distanceToFbU({0.3, 0.4}) == doctest::Approx(0.5));
  CHECK(pair.expected.fbUInFbV);
  CHECK(pair.expected.intrinsicMatchesU);

  const Grid g = unit_box(2, 1.0 / 32.0);
  const ScalarField v = sample(pair.v, g);
  const ScalarField lap = laplacian_residual(v, ScalarField::constant(g, 1.0));
  CHECK(std::max(lap.max(), -lap.min()) < 1e-12);
}

TEST_CASE("half-space pairs") {
  const double c = growth_coefficient();
  SUBCASE("alpha = 1, eps = 0.25") {
    const ExactPair pair = example_halfspace(1.0, 0.25);
    CHECK(pair.u({-0.5, 0.3}) == 0.0);
    CHECK(pair.u({0.5, 0.3}) == doctest::Approx(c * std::pow(0.5, 4.0 / 3.0)));
    CHECK(pair.v({0.2, 0.0}) == 0.0);
    CHECK(pair.v({0.75, 0.0}) == doctest::Approx(0.125));
    CHECK(pair.g({0.75, 0.0}) == doctest::Approx(3.0));
    CHECK(pair.g({0.1, 0.0}) == 0.0);
    CHECK(pair.distanceToFbU({0.3, 0.0}) == doctest::Approx(0.3));
    CHECK(pair.distanceToFbV({0.3, 0.0}) == doctest::Approx(0.05));
    CHECK(pair.expected.intrinsicFbEmpty);
    CHECK_FALSE(pair.expected.intrinsicMatchesU);
  }
  SUBCASE("alpha = 0, eps = 0 is the coupled half-space pair") {
    const ExactPair pair = example_halfspace(0.0, 0.0);
    CHECK(pair.v({0.5, 0.9}) == doctest::Approx(0.125));
    CHECK(pair.g({0.5, 0.9}) == 1.0);
    CHECK(pair.g({-0.5, 0.9}) == 1.0);
    CHECK(pair.expected.fbUInFbV);
    CHECK(pair.expected.intrinsicMatchesU);
    CHECK_FALSE(pair.expected.intrinsicFbEmpty);
  }
  SUBCASE("invalid parameters") {
    CHECK(code_of([] { example_halfspace(0.0, 0.25); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { example_halfspace(-1.0, 0.0); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { example_halfspace(1.0, -0.1); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { example_halfspace(1.0, 0.5); }) == ErrorCode::BadParameter);
    CHECK_NOTHROW(example_halfspace(1.0, 0.0));
  }
}

TEST_CASE("uncoupled pair") {
  const ExactPair pair = example_uncoupled();
  CHECK(pair.v({0.7, -0.4}) == doctest::Approx(0.08));
  CHECK(pair.v({0.7, 0.0}) == 0.0);
  CHECK(pair.u({0.7, 0.0}) > 0.0);
  CHECK(pair.distanceToFbV({0.7, -0.4}) == doctest::Approx(0.4));
  CHECK(pair.expected.fbUInFbV);
}

TEST_CASE("shifted paraboloid") {
  const double eps = 0.1;
  const ExactPair pair = example_shifted_paraboloid(eps);
  CHECK(pair.v({0.0, 0.0}) == doctest::Approx(-eps * eps));
  CHECK_FALSE(pair.expected.nonnegative);
  CHECK(pair.expected.intrinsicFbEmpty);

  // v < 0 exactly on r < 2 eps.
  const Grid g = unit_box(2, 1.0 / 64.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Point p = g.coord(n);
    const double r = std::hypot(p[0], p[1]);
    if (std::abs(r - 2.0 * eps) < 1e-12) continue;
    CHECK((pair.v(p) < 0.0) == (r < 2.0 * eps));
  }
  CHECK(code_of([&] { intrinsic_norm(sample(pair.u, g), sample(pair.v, g)); }) == ErrorCode::NegativityViolation);

  CHECK(code_of([] { example_shifted_paraboloid(0.0); }) == ErrorCode::BadParameter);
  CHECK(code_of([] { example_shifted_paraboloid(0.25); }) == ErrorCode::BadParameter);
}

TEST_CASE("oracle residual orders between h = 1/64 and h = 1/128") {
  const Grid g = unit_box(2, 1.0 / 64.0);
  SUBCASE("radial") {
    const OracleReport r = verify_example(example_radial(), g);
    CHECK(r.uOrder == doctest::Approx(2.0).epsilon(0.15));
    CHECK(r.fine.vResidual <= kExactZero);
    CHECK(r.fine.uNodes > 0);
  }
  SUBCASE("uncoupled") {
    const OracleReport r = verify_example(example_uncoupled(), g);
    CHECK(r.coarse.vResidual <= kExactZero);
    CHECK(r.fine.vResidual <= kExactZero);
    CHECK(r.uOrder == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("half-space alpha = 1, eps = 0.25") {
    const OracleReport r = verify_example(example_halfspace(1.0, 0.25), g);
    CHECK(r.uOrder >= 1.5);
    CHECK(r.vOrder >= 1.5);
    CHECK(r.describe().find("halfspace") != std::string::npos);
  }
}

TEST_CASE("every example passes the oracle on two dyadic grids") {
  for (const ExactPair& pair : {example_radial(), example_uncoupled(), example_halfspace(1.0, 0.25),
                                example_halfspace(0.0, 0.0), example_halfspace(2.0, 0.1),
                                example_shifted_paraboloid(0.1)}) {
    CAPTURE(pair.name);
    CHECK_NOTHROW(verify_example(pair, unit_box(2, 1.0 / 32.0)));
  }
}
