#include <cmath>

#include "doctest.h"
#include "suprad/errors.hpp"
#include "suprad/morse.hpp"
#include "suprad/nonlinearity.hpp"
#include "suprad/singular.hpp"

using namespace suprad;

TEST_SUITE("morse") {

TEST_CASE("euler oracle for the gelfand singular solution") {
  // f'(u*) = 2/r^2: psi ~ r^{-1/2} cos(sqrt(7)/2 ln r + phase), zeros every
  // 2 pi/sqrt(7) in ln r
  auto f = make_exp();
  MorseReport m = morse_regime_check(f, 3);
  CHECK(m.c_star == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.hardy == doctest::Approx(0.25));
  CHECK(m.verdict == MorseVerdict::InfiniteIndexConsistent);
  int at3 = -1, at5 = -1;
  int prev = -1;
  for (auto& [eps, n] : m.zero_counts) {
    if (prev >= 0) CHECK(n >= prev);  // counts grow as eps shrinks
    prev = n;
    if (eps == 1e-3) at3 = n;
    if (eps == 1e-5) at5 = n;
  }
  // ln(sqrt2/1e-3) * sqrt7/(2 pi) = 3.05
  CHECK(std::abs(at3 - 3) <= 1);
  CHECK(std::abs((at5 - at3) - 2) <= 1);  // ~0.97 zeros per decade
}

TEST_CASE("finite-index side has bounded zero counts") {
  auto f = make_exp();
  MorseReport m = morse_regime_check(f, 12);
  CHECK(m.c_star == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(m.hardy == doctest::Approx(25.0));
  CHECK(m.verdict == MorseVerdict::FiniteIndexConsistent);
  int last = -1;
  for (auto& [eps, n] : m.zero_counts) {
    if (eps <= 1e-3 && last >= 0) CHECK(n == last);
    last = n;
  }
}

TEST_CASE("c* identity and the thin stable margin") {
  auto f = make_builtin("power:p=7,a=1");
  MorseReport m = morse_regime_check(f, 11);
  const double q = 7.0 / 6.0;
  const double expect = 2.0 * q * (11.0 - 2.0 * q);  // 364/18
  CHECK(std::abs(m.c_star - expect) <= 0.01 * m.c_star);
  CHECK(m.verdict == MorseVerdict::FiniteIndexConsistent);
  CHECK(m.c_star < m.hardy);
}

TEST_CASE("threshold equivalence with the regime") {
  struct Case {
    const char* spec;
    int N;
  };
  for (const Case& c : {Case{"exp", 3}, Case{"exp", 12},
                        Case{"power:p=7,a=1", 11},
                        Case{"power:p=6,a=1", 3}}) {
    CAPTURE(c.spec);
    CAPTURE(c.N);
    auto f = make_builtin(c.spec);
    MorseReport m = morse_regime_check(f, c.N);
    if (m.regime == Regime::Oscillatory)
      CHECK(m.c_star > m.hardy);
    else if (m.regime == Regime::Stable && !classify(f, c.N).at_jl_boundary)
      CHECK(m.c_star < m.hardy);
  }
}

TEST_CASE("preconditions") {
  auto f = make_exp();
  auto sing = construct_singular(f, 3, 1.0);
  CHECK_THROWS_AS((void)linearized_zero_count(f, sing, 1.0),
                  PreconditionError);  // eps >= r0*/2
  CHECK_THROWS_AS((void)morse_regime_check(make_builtin("power:p=5"), 3),
                  RegimeError);  // q = q_S
}

}  // TEST_SUITE
