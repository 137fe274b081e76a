#include <cmath>
#include <memory>

#include "doctest.h"
#include "suprad/errors.hpp"
#include "suprad/intersect.hpp"
#include "suprad/nonlinearity.hpp"

using namespace suprad;

TEST_SUITE("intersect") {

TEST_CASE("closed-form crossing of the two critical bubbles") {
  auto b1 = Profile::from_function(
      [](double s) { return 1.0 / std::sqrt(1.0 + s * s / 3.0); }, 0.0, 20.0,
      false);
  auto b2 = Profile::from_function(
      [](double s) { return 2.0 / std::sqrt(1.0 + 16.0 * s * s / 3.0); }, 0.0,
      20.0, false);
  auto rep = count_intersections(b1, b2, 0.0, 10.0);
  REQUIRE(rep.count == 1);
  CHECK(rep.zeros[0] ==
        doctest::Approx(0.8660254037844386).epsilon(1e-10));
  CHECK(static_cast<int>(rep.zeros.size()) == rep.count);
}

TEST_CASE("zeros are increasing and inside the interval") {
  auto p0 = Profile::from_function([](double s) { return std::cos(s); }, 0.0,
                                   50.0, false);
  auto p1 = Profile::from_function([](double) { return 0.0; }, 0.0, 50.0,
                                   false);
  auto rep = count_intersections(p0, p1, 0.1, 20.0);
  CHECK(rep.count == 6);  // pi/2 + k pi below 20
  for (std::size_t i = 0; i < rep.zeros.size(); ++i) {
    CHECK(rep.zeros[i] > rep.a);
    CHECK(rep.zeros[i] < rep.b);
    if (i) CHECK(rep.zeros[i] > rep.zeros[i - 1]);
    CHECK(rep.zeros[i] ==
          doctest::Approx(M_PI / 2 + i * M_PI).epsilon(1e-9));
  }
}

TEST_CASE("grazing contact reports a near-tangency, not a crossing") {
  auto p0 = Profile::from_function(
      [](double s) { return (s - 1.0) * (s - 1.0) + 1e-10; }, 0.0, 5.0,
      false);
  auto p1 = Profile::from_function([](double) { return 0.0; }, 0.0, 5.0,
                                   false);
  IntersectOpts opts;
  opts.min_nodes_per_decade = 4000;  // resolve the quadratic bottom
  auto rep = count_intersections(p0, p1, 0.5, 2.0, opts);
  CHECK(rep.count == 0);
  CHECK(rep.near_tangencies.size() == 1);
  CHECK(rep.near_tangencies[0] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("truncation flag when the window exceeds the profiles") {
  auto p0 = Profile::from_function([](double s) { return s; }, 0.0, 3.0,
                                   false);
  auto p1 = Profile::from_function([](double) { return 1.0; }, 0.0, 3.0,
                                   false);
  auto rep = count_intersections(p0, p1, 0.0, 10.0);
  CHECK(rep.truncated);
  CHECK(rep.count == 1);
}

TEST_CASE("comparison bound gates on the regime") {
  CHECK_THROWS_AS(
      (void)comparison_bound_check(make_exp(), 3, 1.0, 0.0, 10.0),
      PreconditionError);
}

TEST_CASE("comparison bound holds in the stable regime") {
  auto rep = comparison_bound_check(make_exp(), 10, 1.0, 0.0, 50.0);
  CHECK(rep.pass);
  CHECK(rep.max_violation <= 1e-9);
}

}  // TEST_SUITE
