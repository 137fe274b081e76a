#include "suprad/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "suprad/errors.hpp"
#include "suprad/transforms.hpp"

namespace suprad {

Profile Profile::from_solution(std::shared_ptr<const RadialSolution> sol) {
  Profile p;
  p.eval_ = [sol](double r) { return sol->eval(r).u; };
  p.lo_ = sol->has_center ? 0.0 : sol->front_radius();
  p.hi_ = sol->back_radius();
  p.singular_origin_ = false;
  p.has_center_ = sol->has_center;
  p.center_ = sol->center_value;
  p.nodes_ = sol->r;
  return p;
}

Profile Profile::from_singular(std::shared_ptr<const SingularSolution> sol) {
  Profile p;
  p.eval_ = [sol](double r) { return sol->eval(r).u; };
  p.lo_ = sol->inner_radius();
  p.hi_ = sol->outer_radius();
  p.singular_origin_ = true;
  p.nodes_ = sol->outer.r;
  return p;
}

Profile Profile::from_function(Eval eval, double lo, double hi,
                               bool singular_origin) {
  Profile p;
  p.eval_ = std::move(eval);
  p.lo_ = lo;
  p.hi_ = hi;
  p.singular_origin_ = singular_origin;
  return p;
}

namespace {

// Left clip below which a singular profile dominates: largest r with
// p_sing(r) >= 2 max(|center of the other|, 1).  The difference has a fixed
// sign below it.
double sing_clip(const Profile& sing, const Profile& other, double a,
                 double b) {
  const double thresh =
      2.0 * std::max(other.has_center() ? std::abs(other.center()) : 1.0, 1.0);
  double lo = std::max(a, sing.lo());
  if (sing(lo) < thresh) return lo;
  double hi = std::min(b, sing.hi());
  if (sing(hi) >= thresh) return hi;  // dominates everywhere: nothing to scan
  for (int i = 0; i < 200; ++i) {
    const double m = std::sqrt(lo * hi);
    if (sing(m) >= thresh)
      lo = m;
    else
      hi = m;
    if (hi / lo < 1.0 + 1e-12) break;
  }
  return lo;
}

}  // namespace

IntersectionReport count_intersections(const Profile& p0, const Profile& p1,
                                       double a, double b,
                                       const IntersectOpts& opts) {
  IntersectionReport rep;
  double lo = std::max({a, p0.lo(), p1.lo()});
  double hi = std::min({b, p0.hi(), p1.hi()});
  rep.truncated = hi < b;
  if (p0.singular_origin() && !p1.singular_origin())
    lo = std::max(lo, sing_clip(p0, p1, lo, hi));
  if (p1.singular_origin() && !p0.singular_origin())
    lo = std::max(lo, sing_clip(p1, p0, lo, hi));
  if (lo <= 0.0) lo = hi * 1e-12;
  rep.a = lo;
  rep.b = hi;
  if (!(hi > lo)) return rep;

  // merged scan grid: both node sets plus a geometric fill
  std::set<double> grid;
  for (const auto* pr : {&p0, &p1})
    for (double rn : pr->nodes())
      if (rn > lo && rn < hi) grid.insert(rn);
  const double ratio =
      std::pow(10.0, 1.0 / std::max(1, opts.min_nodes_per_decade));
  for (double r = lo; r < hi; r *= ratio) grid.insert(r);
  grid.insert(lo);
  grid.insert(hi);
  std::vector<double> xs(grid.begin(), grid.end());

  std::vector<double> d(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) d[i] = p0(xs[i]) - p1(xs[i]);

  auto diff = [&](double r) { return p0(r) - p1(r); };
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (d[i] == 0.0) {
      rep.zeros.push_back(xs[i]);
      continue;
    }
    if ((d[i] > 0) != (d[i + 1] > 0)) {
      double ra = xs[i], rb = xs[i + 1];
      double fa = d[i];
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (ra + rb);
        const double fm = diff(m);
        if (fm == 0.0) {
          ra = rb = m;
          break;
        }
        if ((fm > 0) == (fa > 0)) {
          ra = m;
          fa = fm;
        } else {
          rb = m;
        }
        if (rb - ra <= opts.refine_rel * std::max(1.0, std::abs(m))) break;
      }
      rep.zeros.push_back(0.5 * (ra + rb));
    }
  }

  // grazing contacts: interior minima of |d| below the tangency threshold
  // with no adjacent sign change
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double ad = std::abs(d[i]);
    if (ad < std::abs(d[i - 1]) && ad < std::abs(d[i + 1]) &&
        (d[i - 1] > 0) == (d[i] > 0) && (d[i + 1] > 0) == (d[i] > 0)) {
      const double scale =
          std::max({1.0, std::abs(p0(xs[i])), std::abs(p1(xs[i]))});
      if (ad < opts.near_tangency_rel * scale && ad != 0.0)
        rep.near_tangencies.push_back(xs[i]);
    }
  }
  rep.count = static_cast<int>(rep.zeros.size());
  return rep;
}

ComparisonBoundReport comparison_bound_check(const Nonlinearity& f, int N,
                                             double q, double sigma,
                                             double r_max,
                                             const ShootOpts& opts_in) {
  const double q_JL = (N - 2.0 * std::sqrt(N - 1.0)) / 4.0;
  if (q > q_JL + 1e-9)
    throw PreconditionError("comparison bound requires q <= q_JL (q=" +
                            std::to_string(q) + ", q_JL=" +
                            std::to_string(q_JL) + ")");
  // F f' >= q sampled on a log grid over [0, 1e6] (clamped to range)
  for (int i = 0; i <= 40; ++i) {
    const double u = std::pow(10.0, -2.0 + 8.0 * i / 40.0);
    if (!std::isfinite(f.f(u)) || !(f.f(u) < 1e290)) break;
    if (f.phi(u) < q - 1e-9)
      throw PreconditionError("comparison bound requires F f' >= q; fails at "
                              "u=" + std::to_string(u));
  }

  const ReferenceNonlinearity ref = make_reference(q);
  const double rho = f.F_inv(ref.F(sigma));
  ShootOpts opts = opts_in;
  opts.r_max = r_max;
  opts.stop_at_first_zero = false;
  RadialSolution u = shoot_regular(f, N, rho, opts);

  const double k = 2.0 * N - 4.0 * q;
  ComparisonBoundReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  const double dmin = f.domain_min();
  for (std::size_t i = 0; i < u.r.size(); ++i) {
    if (u.u[i] <= dmin + 1e-9 * (1.0 + std::abs(dmin))) break;
    const double wt = ref.F_inv(f.F(u.u[i]));
    const double bound = ref.F_inv(u.r[i] * u.r[i] / k);
    const double viol = wt - bound;
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      rep.at_r = u.r[i];
    }
  }
  rep.pass = rep.max_violation <= 1e-9;
  return rep;
}

}  // namespace suprad
