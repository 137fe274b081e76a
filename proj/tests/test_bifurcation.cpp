#include <cmath>

#include "doctest.h"
#include "suprad/bifurcation.hpp"
#include "suprad/errors.hpp"
#include "suprad/nonlinearity.hpp"

using namespace suprad;

TEST_SUITE("bifurcation") {

TEST_CASE("extension: shape, positivity, smooth junction") {
  for (const char* spec : {"exp", "power:p=5,a=1"}) {
    CAPTURE(spec);
    auto f = make_builtin(spec);
    auto fe = extend_nonlinearity(f);
    CHECK(fe.extended());
    CHECK(fe.f(-1.5) == doctest::Approx(0.5));  // delta = f(0) = 1
    // monotone and positive through the ramp
    double prev = fe.f(-1.0 - 1e-12);
    for (double u = -1.0; u <= 0.0; u += 1e-3) {
      const double v = fe.f(u);
      CHECK(v > 0.0);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    // C^1 at zero
    const double h = 1e-7;
    CHECK((fe.f(h) - fe.f(-h)) / (2 * h) ==
          doctest::Approx(f.df(0.0)).epsilon(1e-5));
    CHECK(fe.f(2.0) == doctest::Approx(f.f(2.0)));
  }
  CHECK_THROWS_AS((void)extend_nonlinearity(make_builtin("power:p=5")),
                  PreconditionError);
}

TEST_CASE("mu is independent of the extension shape") {
  auto f = make_exp();
  auto e1 = extend_nonlinearity(f, false);
  auto e2 = extend_nonlinearity(f, true);
  for (double rho : {0.5, 2.0, 20.0}) {
    const double m1 = mu_of_rho(e1, 3, rho).mu;
    const double m2 = mu_of_rho(e2, 3, rho).mu;
    CHECK(m1 == doctest::Approx(m2).epsilon(1e-12));
  }
}

TEST_CASE("small-rho asymptote mu ~ 2N rho / f(0)") {
  auto fe = extend_nonlinearity(make_exp());
  const double m = mu_of_rho(fe, 3, 1e-4).mu;
  CHECK(m / 1e-4 == doctest::Approx(6.0).epsilon(0.01));
  CHECK(mu_of_rho(fe, 3, 1e-4).mu < 1e-2 * mu_of_rho(fe, 3, 1.0).mu);
}

TEST_CASE("mu is continuous in rho") {
  auto fe = extend_nonlinearity(make_exp());
  const double m0 = mu_of_rho(fe, 3, 1.0).mu;
  double prev_gap = 1e300;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double gap = std::abs(mu_of_rho(fe, 3, 1.0 + h).mu - m0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 1e-3);
}

TEST_CASE("gelfand singular values") {
  auto fe = extend_nonlinearity(make_exp());
  CHECK(mu_star(fe, 3) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(mu_star(fe, 9) == doctest::Approx(14.0).epsilon(1e-6));
}

TEST_CASE("mu_star is stable under tolerance halving") {
  auto f = make_builtin("power:p=6,a=1");
  auto fe = extend_nonlinearity(f);
  SingularOpts a;
  a.tol = 1e-9;
  SingularOpts b;
  b.tol = 5e-10;
  const double m1 = mu_star(fe, 3, a);
  const double m2 = mu_star(fe, 3, b);
  CHECK(m1 > 0.0);
  CHECK(std::abs(m1 - m2) <= 1e-4 * m1);
}

TEST_CASE("huge centers go through the similarity composition") {
  auto fe = extend_nonlinearity(make_exp());
  // far beyond the direct series range; the Gelfand tail sits at mu* = 2
  const double m = mu_of_rho(fe, 3, 800.0).mu;
  CHECK(m == doctest::Approx(2.0).epsilon(1e-5));
  // continuity across the direct/composition threshold
  const double rd = rho_direct_max(fe);
  const double md = mu_of_rho(fe, 3, rd * 0.99).mu;
  const double mc = mu_of_rho(fe, 3, rd * 1.01).mu;
  CHECK(md == doctest::Approx(mc).epsilon(1e-5));
}

TEST_CASE("oscillation bracketing and turning-point stability") {
  // Gelfand folds for exp N=3 are spaced 4pi/sqrt7 apart in rho and
  // alternate between maxima above mu* and minima below it.
  auto f = make_exp();
  SweepOpts so;
  so.rho_min = 0.05;
  so.rho_max = 22.0;
  so.points = 80;
  BifurcationCurve c = sweep_curve(f, 3, so);
  REQUIRE(c.mu_star.has_value());
  REQUIRE(c.turning_points.size() >= 2);
  CHECK(c.classification == "Oscillatory-consistent");
  auto fe = extend_nonlinearity(f);
  // consecutive extrema straddle mu*, forcing a crossing between them
  std::vector<double> ext_mu;
  for (double tp : c.turning_points)
    ext_mu.push_back(mu_of_rho(fe, 3, tp).mu);
  for (std::size_t k = 0; k + 1 < ext_mu.size(); ++k) {
    const double d0 = ext_mu[k] - *c.mu_star;
    const double d1 = ext_mu[k + 1] - *c.mu_star;
    CHECK(d0 * d1 < 0.0);
  }
  // fold spacing follows the linearized period 4pi/sqrt(7)
  for (std::size_t k = 0; k + 1 < c.turning_points.size(); ++k) {
    const double gap = c.turning_points[k + 1] - c.turning_points[k];
    CHECK(gap == doctest::Approx(4.0 * M_PI / std::sqrt(7.0)).epsilon(0.15));
  }
  // each turning point is a genuine local extremum of mu
  for (double tp : c.turning_points) {
    const double m = mu_of_rho(fe, 3, tp).mu;
    const double ml = mu_of_rho(fe, 3, tp - 0.4).mu;
    const double mr = mu_of_rho(fe, 3, tp + 0.4).mu;
    const bool is_max = m >= ml && m >= mr;
    const bool is_min = m <= ml && m <= mr;
    CHECK((is_max || is_min));
  }
}

TEST_CASE("monotone classification in the stable regime") {
  auto f = make_exp();
  SweepOpts so;
  so.rho_min = 0.1;
  so.rho_max = 50.0;
  so.points = 40;
  BifurcationCurve c = sweep_curve(f, 10, so);
  CHECK(c.classification == "Monotone-consistent");
  CHECK(c.turning_points.empty());
  REQUIRE(c.mu_star.has_value());
  CHECK(*c.mu_star == doctest::Approx(16.0).epsilon(1e-8));
}

TEST_CASE("per-sample failures are recorded, sweep continues") {
  // exppow centers overflow the series start beyond u ~ 18.5; those samples
  // must fail gracefully while small-rho samples succeed
  auto f = make_builtin("exppow:p=2");
  SweepOpts so;
  so.rho_min = 1.0;
  so.rho_max = 100.0;
  so.points = 10;
  so.compute_mu_star = false;
  BifurcationCurve c = sweep_curve(f, 5, so);
  int ok = 0, bad = 0;
  for (const auto& s : c.samples) (s.ok ? ok : bad)++;
  CHECK(ok >= 4);
  CHECK(bad >= 2);
  for (const auto& s : c.samples)
    if (!s.ok) CHECK_FALSE(s.error.empty());
}

}  // TEST_SUITE
