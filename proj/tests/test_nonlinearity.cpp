#include <cmath>
#include <vector>

#include "doctest.h"
#include "suprad/errors.hpp"
#include "suprad/nonlinearity.hpp"

using namespace suprad;

namespace {
const char* kBuiltins[] = {
    "power:p=5",          "power:p=6,a=1", "exp",
    "exppow:p=2",         "iterexp:n=2",   "powlog:p=3,gamma=2,a=2",
    "tetration:n=2,a=2",
};

// w grid clamped into the range of F for bounded families
std::vector<double> w_grid(const Nonlinearity& f) {
  std::vector<double> ws;
  for (int i = 0; i <= 50; ++i) {
    const double w = std::pow(10.0, -8.0 + 12.0 * i / 50.0);
    try {
      (void)f.F_inv(w);
      ws.push_back(w);
    } catch (const Error&) {
    }
  }
  return ws;
}
}  // namespace

TEST_SUITE("nonlinearity") {

TEST_CASE("grammar accepts the documented forms") {
  CHECK(make_builtin("power:p=5").kind() == Kind::Power);
  CHECK(make_builtin("exp").kind() == Kind::Exponential);
  CHECK(make_builtin("exppow:p=2").kind() == Kind::ExpPower);
  CHECK(make_builtin("iterexp:n=3").kind() == Kind::IteratedExp);
  CHECK(make_builtin("powlog:p=3,gamma=2,a=2").kind() == Kind::PowerLog);
  CHECK(make_builtin("tetration:n=2,a=2").kind() == Kind::Tetration);
  CHECK(*make_builtin("power:p=5").q_analytic() == doctest::Approx(1.25));
  CHECK(*make_builtin("powlog:p=3,gamma=2,a=2").q_analytic() ==
        doctest::Approx(1.5));
  CHECK(*make_builtin("exp").q_analytic() == 1.0);
  CHECK(*make_builtin("tetration:n=2,a=2").q_analytic() == 1.0);
}

TEST_CASE("grammar rejects malformed and out-of-range input") {
  CHECK_THROWS_AS((void)make_builtin("power"), ParseError);
  CHECK_THROWS_AS((void)make_builtin("power:p=5,zz=1"), ParseError);
  CHECK_THROWS_AS((void)make_builtin("power:p"), ParseError);
  CHECK_THROWS_AS((void)make_builtin("bogus"), ParseError);
  CHECK_THROWS_AS((void)make_builtin("iterexp:n=2.5"), ParseError);
  CHECK_THROWS_AS((void)make_builtin("power:p=0.5"), ConstraintError);
  CHECK_THROWS_AS((void)make_builtin("exppow:p=0.9"), ConstraintError);
  CHECK_THROWS_AS((void)make_builtin("iterexp:n=1"), ConstraintError);
  CHECK_THROWS_AS((void)make_builtin("powlog:p=3,gamma=2,a=1"),
                  ConstraintError);
  CHECK_THROWS_AS((void)make_builtin("tetration:n=2,a=0.5"), ConstraintError);
}

TEST_CASE("closed-form F values") {
  auto p5 = make_builtin("power:p=5");
  CHECK(p5.F(2.0) == doctest::Approx(0.015625).epsilon(1e-14));
  CHECK(p5.F(1.0) == doctest::Approx(0.25).epsilon(1e-14));
  auto e = make_builtin("exp");
  CHECK(e.F(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.F_inv(1.0) == doctest::Approx(0.0));
  CHECK(p5.F_inv(0.25) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quadrature path agrees with closed forms") {
  for (const char* spec : {"power:p=5", "power:p=6,a=1", "exp"}) {
    auto f = make_builtin(spec);
    for (double u : {0.5, 1.0, 3.0, 10.0}) {
      if (u <= f.domain_min()) continue;
      CHECK(numeric_F(f, u) ==
            doctest::Approx(f.F(u)).epsilon(1e-8));
    }
  }
}

TEST_CASE("frozen quadrature anchors") {
  // int_3^inf e^{-t^2} dt and the iterated-exp exponential integral
  CHECK(make_builtin("exppow:p=2").F(3.0) ==
        doctest::Approx(1.9577193236779755e-05).epsilon(1e-10));
  CHECK(make_builtin("iterexp:n=2").F(1.0) ==
        doctest::Approx(0.018732469573308257).epsilon(1e-10));
  CHECK(make_builtin("powlog:p=3,gamma=2,a=2").F(1.0) ==
        doctest::Approx(0.026475283878059067).epsilon(1e-9));
  // F f' for exp(u^2) at u=1 equals e*sqrt(pi)*erfc(1)
  CHECK(make_builtin("exppow:p=2").phi(1.0) ==
        doctest::Approx(0.7578721561413121).epsilon(1e-10));
}

TEST_CASE("F is positive, decreasing; derivative identity; round trip") {
  for (const char* spec : kBuiltins) {
    CAPTURE(spec);
    auto f = make_builtin(spec);
    const double lo = std::max(f.domain_min() + 0.25, 0.25);
    double prevF = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double u = lo * std::pow(10.0, 2.0 * i / 20.0);
      CHECK(f.f(u) > 0.0);
      const double Fu = f.F(u);
      if (Fu < 1e-30) break;  // past this F leaves double range
      CHECK(Fu > 0.0);
      if (prevF > 0.0) CHECK(Fu < prevF);
      prevF = Fu;
      // central difference of F against -1/f
      const double h = 1e-5 * std::max(u, 1.0);
      const double fd = (f.F(u + h) - f.F(u - h)) / (2.0 * h);
      CHECK(std::abs(fd + 1.0 / f.f(u)) <= 1e-6 / f.f(u));
    }
    double worst = 0.0;
    for (double w : w_grid(f)) {
      const double back = f.F(f.F_inv(w));
      worst = std::max(worst, std::abs(back - w) / w);
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("estimate_q matches analytic limits") {
  CHECK(estimate_q(make_builtin("power:p=6")).q ==
        doctest::Approx(1.2).epsilon(1e-9));
  CHECK(estimate_q(make_builtin("exppow:p=2")).q ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(estimate_q(make_builtin("tetration:n=2,a=2")).q ==
        doctest::Approx(1.0).epsilon(1e-3));
  // Lemma guard: q >= 1 - 1e-6 on every builtin
  for (const char* spec : kBuiltins)
    CHECK(estimate_q(make_builtin(spec)).q >= 1.0 - 1e-6);
}

TEST_CASE("classify: regimes and exponent formulas") {
  auto e = make_exp();
  {
    const ExponentReport r = classify(e, 3);
    CHECK(r.q == 1.0);
    CHECK(r.q_S == doctest::Approx(1.25));
    CHECK(r.q_JL == doctest::Approx(0.042893218813452484).epsilon(1e-12));
    CHECK(r.k == doctest::Approx(2.0));
    CHECK(r.regime == Regime::Oscillatory);
    CHECK(std::isinf(r.p));
  }
  {
    // q = q_JL = 1 exactly at N = 10: stable side, boundary flagged
    const ExponentReport r = classify(e, 10);
    CHECK(r.q_JL == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.regime == Regime::Stable);
    CHECK(r.at_jl_boundary);
  }
  {
    const ExponentReport r = classify(make_builtin("power:p=7,a=1"), 11);
    CHECK(r.q == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
    CHECK(r.q_JL == doctest::Approx(1.1688611699158103).epsilon(1e-12));
    CHECK(r.regime == Regime::Stable);
    CHECK(r.p_JL == doctest::Approx(6.922024586816337).epsilon(1e-12));
  }
  {
    const ExponentReport r = classify(make_builtin("power:p=5"), 3);
    CHECK(r.regime == Regime::Critical);
  }
  {
    // q above q_S
    const ExponentReport r = classify(make_builtin("power:p=3"), 3);
    CHECK(r.regime == Regime::OutOfScope);
  }
}

TEST_CASE("exponent identities") {
  // conjugate identity whenever q > 1
  for (const char* spec : {"power:p=5", "power:p=7,a=1",
                           "powlog:p=3,gamma=2,a=2"}) {
    const ExponentReport r = classify(make_builtin(spec), 11);
    CHECK(std::abs(1.0 / r.p + 1.0 / r.q - 1.0) <= 1e-12);
  }
  // 2 q_JL (N - 2 q_JL) = (N-2)^2/4
  for (int N = 3; N <= 30; ++N) {
    const double qjl = (N - 2.0 * std::sqrt(N - 1.0)) / 4.0;
    CHECK(std::abs(2.0 * qjl * (N - 2.0 * qjl) -
                   (N - 2.0) * (N - 2.0) / 4.0) <= 1e-10);
  }
  // pure power: k/(p-1) = (2/(p-1))(N-2-2/(p-1))
  for (double p : {4.0, 5.0, 6.0, 9.0}) {
    const int N = 3;
    const double q = p / (p - 1.0);
    const double k = 2.0 * N - 4.0 * q;
    const double m = 2.0 / (p - 1.0);
    CHECK(std::abs(k / (p - 1.0) - m * (N - 2.0 - m)) <= 1e-12);
  }
}

TEST_CASE("superlinearity margin check") {
  CHECK(check_superlinearity(make_builtin("power:p=6"), 3, 100.0, 10.0).pass);
  CHECK(check_superlinearity(make_exp(), 3, 100.0, 5.0).pass);
  CHECK_FALSE(
      check_superlinearity(make_builtin("power:p=4"), 3, 100.0, 0.0).pass);
}

}  // TEST_SUITE
