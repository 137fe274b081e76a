#include <cmath>
#include <sstream>

#include "doctest.h"
#include "suprad/errors.hpp"
#include "suprad/nonlinearity.hpp"
#include "suprad/singular.hpp"

using namespace suprad;

TEST_SUITE("singular") {

TEST_CASE("exact profiles for scale-invariant families") {
  auto fe = make_exp();
  SingularSolution s = construct_singular(fe, 3, 1.0);
  REQUIRE(s.r0_star.has_value());
  CHECK(*s.r0_star == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(s.eval(1.0).u == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(std::abs(s.eval(std::sqrt(2.0) * (1.0 - 1e-12)).u) <= 1e-9);
  CHECK(s.diag.phi_gap_at_start == 0.0);
  CHECK(s.diag.overlap_gap <= 1e-8);

  auto f6 = make_builtin("power:p=6");
  SingularSolution s6 = construct_singular(f6, 3, 1.2);
  CHECK_FALSE(s6.r0_star.has_value());  // pure power never reaches zero
  CHECK(s6.eval(1.0).u ==
        doctest::Approx(std::pow(0.24, 0.2)).epsilon(1e-10));
  // derivative of (k/(5 r^2))^{1/5}
  CHECK(s6.eval(1.0).du ==
        doctest::Approx(-0.4 * std::pow(0.24, 0.2)).epsilon(1e-8));
}

TEST_CASE("exact limit singular values") {
  CHECK(exact_singular_limit(make_builtin("power:p=5"), 3, 1.25, 1.0) ==
        doctest::Approx(std::pow(4.0, -0.25)).epsilon(1e-12));
  CHECK(exact_singular_limit(make_exp(), 5, 1.0, 1.0) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(std::abs(exact_singular_limit(make_exp(), 3, 1.0, std::sqrt(2.0))) <=
        1e-12);
}

TEST_CASE("regime gate and eigenvalue structure") {
  CHECK_THROWS_AS(
      (void)construct_singular(make_builtin("power:p=5"), 3, 1.25),
      RegimeError);
  // oscillatory: complex pair <-> D < 0
  auto se = construct_singular(make_exp(), 3, 1.0);
  CHECK(se.diag.D < 0.0);
  CHECK(se.diag.lambda_plus.imag() != 0.0);
  CHECK(se.diag.lambda_plus.real() > 0.0);
  CHECK(se.diag.mu_decay == doctest::Approx(0.5));
  // N = 10 sits exactly on the JL boundary: double root, shifted decay rate
  auto s10 = construct_singular(make_exp(), 10, 1.0);
  CHECK(std::abs(s10.diag.D) <= 1e-12);
  CHECK(s10.diag.mu_decay == doctest::Approx(4.0 - 0.01));
  // stable side proper: real pair, D > 0
  auto s12 = construct_singular(make_exp(), 12, 1.0);
  CHECK(s12.diag.D == doctest::Approx(20.0));
  CHECK(s12.diag.lambda_minus.imag() == 0.0);
  CHECK(s12.diag.lambda_minus.real() > 0.0);
}

TEST_CASE("theta vanishing bound with an honest start gap") {
  // For families with slow F f' convergence delta_q is unreachable in
  // doubles; the recorded gap bounds the first-decade theta instead.
  struct Case {
    const char* spec;
    int N;
    double q;
  };
  for (const Case& c : {Case{"powlog:p=3,gamma=2,a=2", 5, 1.5},
                        Case{"exppow:p=2", 3, 1.0}}) {
    CAPTURE(c.spec);
    auto f = make_builtin(c.spec);
    SingularOpts so;
    // the powlog gap decays like 1/log u*; it needs the deep default floor
    // to fit the containment box, exppow saturates much earlier
    so.t_floor = c.q > 1.0 ? -300.0 : -40.0;
    so.r_max = 50.0;
    SingularSolution s = construct_singular(f, c.N, c.q, so);
    CHECK(s.diag.phi_gap_at_start > 0.0);
    double first_decade = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (s.t[i] > s.t_start + std::log(10.0)) break;
      first_decade = std::max(first_decade, std::abs(s.x[i]));
    }
    CHECK(first_decade <=
          std::max(10.0 * s.diag.phi_gap_at_start, 1e-12));
  }
}

TEST_CASE("containment box exit is reported") {
  auto f = make_builtin("powlog:p=3,gamma=2,a=2");
  SingularOpts so;
  so.t_floor = -40.0;
  so.eps_box = 1e-12;  // impossible box given the honest start gap
  CHECK_THROWS_AS((void)construct_singular(f, 5, 1.5, so), NumericError);
}

TEST_CASE("inner map matches the outer leg across the handoff") {
  auto f = make_builtin("power:p=6,a=1");
  SingularSolution s = construct_singular(f, 3, 1.2);
  CHECK(s.diag.overlap_gap <= 1e-8);
  // continuity at the interface radius
  const double r = s.r_inner_end;
  const auto below = s.eval(r * (1.0 - 1e-9));
  const auto above = s.eval(r * (1.0 + 1e-9));
  CHECK(below.u == doctest::Approx(above.u).epsilon(1e-8));
}

TEST_CASE("csv export shape") {
  auto f = make_exp();
  SingularSolution s = construct_singular(f, 3, 1.0);
  std::ostringstream os;
  write_csv(s, os);
  const std::string str = os.str();
  CHECK(str.rfind("r,theta,u_star,du_star\n", 0) == 0);
  CHECK(std::count(str.begin(), str.end(), '\n') > 32);
}

}  // TEST_SUITE
