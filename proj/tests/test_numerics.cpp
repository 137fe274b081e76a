#include <cmath>

#include "doctest.h"
#include "suprad/interp.hpp"
#include "suprad/quadrature.hpp"
#include "suprad/roots.hpp"

using namespace suprad;

TEST_SUITE("numerics") {

TEST_CASE("gauss-kronrod basics") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // half-Gaussian
  CHECK(integrate([](double x) { return std::exp(-x * x); }, 0.0, 8.0) ==
        doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature resolves a localized bump") {
  auto f = [](double x) {
    const double t = (x - 0.5) / 0.05;
    return std::exp(-t * t);
  };
  const double v = integrate(f, 0.0, 5.0, 1e-14, 1e-10);
  CHECK(v == doctest::Approx(0.05 * std::sqrt(M_PI)).epsilon(1e-8));
}

TEST_CASE("bisect and safeguarded newton") {
  const double r = bisect([](double x) { return std::cos(x); }, 1.0, 2.0,
                          1e-14, 0.0);
  CHECK(r == doctest::Approx(M_PI / 2).epsilon(1e-12));
  const double r2 = newton_bisect(
      [](double x, double& fx, double& dfx) {
        fx = x * x * x - 2.0;
        dfx = 3.0 * x * x;
      },
      1.0, 2.0, 1e-14, 1e-15);
  CHECK(r2 == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
}

TEST_CASE("quintic hermite reproduces quintics exactly") {
  auto p = [](double x) {
    return ((x - 2) * x + 3) * x * x * x - 5 * x * x + x - 7;
  };
  auto dp = [](double x) {
    return 5 * x * x * x * x - 8 * x * x * x + 9 * x * x - 10 * x + 1;
  };
  auto ddp = [](double x) { return 20 * x * x * x - 24 * x * x + 18 * x - 10; };
  QuinticPiece q{0.5, 1.7, p(0.5), dp(0.5), ddp(0.5), p(1.7), dp(1.7), ddp(1.7)};
  for (double x : {0.5, 0.8, 1.1, 1.4, 1.7}) {
    CHECK(q.value(x) == doctest::Approx(p(x)).epsilon(1e-12));
    CHECK(q.deriv(x) == doctest::Approx(dp(x)).epsilon(1e-11));
    CHECK(q.deriv2(x) == doctest::Approx(ddp(x)).epsilon(1e-10));
  }
}

TEST_CASE("cubic spline interpolates smooth data") {
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    x.push_back(i * 0.01);
    y.push_back(std::sin(x.back()));
  }
  CubicSpline s(x, y);
  // natural boundary conditions cost accuracy near the ends
  for (double t : {0.123, 0.777, 1.5})
    CHECK(s(t) == doctest::Approx(std::sin(t)).epsilon(1e-8));
  CHECK(s(1.999) == doctest::Approx(std::sin(1.999)).epsilon(1e-5));
}

}  // TEST_SUITE
