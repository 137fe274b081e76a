#ifndef SUPRAD_INTERSECT_HPP
#define SUPRAD_INTERSECT_HPP

#include <functional>
#include <memory>
#include <vector>

#include "suprad/nonlinearity.hpp"
#include "suprad/radial_ode.hpp"
#include "suprad/singular.hpp"

namespace suprad {

// Evaluable radial profile with a seeding grid for sign scans.
class Profile {
 public:
  using Eval = std::function<double(double)>;

  static Profile from_solution(std::shared_ptr<const RadialSolution> sol);
  static Profile from_singular(std::shared_ptr<const SingularSolution> sol);
  // Closed-form profile; singular_origin marks u -> inf as r -> 0.
  static Profile from_function(Eval eval, double lo, double hi,
                               bool singular_origin);

  double operator()(double r) const { return eval_(r); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool singular_origin() const { return singular_origin_; }
  bool has_center() const { return has_center_; }
  double center() const { return center_; }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  Eval eval_;
  double lo_ = 0.0, hi_ = 0.0;
  bool singular_origin_ = false;
  bool has_center_ = false;
  double center_ = 0.0;
  std::vector<double> nodes_;
};

struct IntersectOpts {
  int min_nodes_per_decade = 48;
  double refine_rel = 1e-10;
  double near_tangency_rel = 1e-8;
};

struct IntersectionReport {
  double a = 0.0, b = 0.0;  // effective interval after clipping
  int count = 0;
  std::vector<double> zeros;
  std::vector<double> near_tangencies;
  bool truncated = false;
};

// Z_(a,b)[p0 - p1]: transversal sign changes of the difference, refined by
// bisection; grazing contacts reported separately.
IntersectionReport count_intersections(const Profile& p0, const Profile& p1,
                                       double a, double b,
                                       const IntersectOpts& opts = {});

struct ComparisonBoundReport {
  bool pass = false;
  double max_violation = 0.0;  // max of wtilde - F_q^-1[k^-1 r^2]
  double at_r = 0.0;
};

// Checks F_q^-1[F(u(r,rho))] <= F_q^-1[k^-1 r^2] with rho = F^-1[F_q(sigma)],
// after verifying the comparison-lemma preconditions q <= q_JL and
// F f' >= q on a sample grid.
ComparisonBoundReport comparison_bound_check(const Nonlinearity& f, int N,
                                             double q, double sigma,
                                             double r_max,
                                             const ShootOpts& opts = {});

}  // namespace suprad

#endif
