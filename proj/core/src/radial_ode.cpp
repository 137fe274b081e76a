#include "suprad/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "suprad/errors.hpp"
#include "suprad/rk.hpp"

namespace suprad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<const CubicSpline> build_cterm(const Nonlinearity& f, double q,
                                               double center) {
  if (f.phi_exact()) return nullptr;
  // Node range: down from the center far enough for any sane trajectory,
  // clamped where f leaves double range or the domain ends.
  double lo = center - 60.0;
  lo = std::max(lo, f.domain_min() + 1e-8 * (1.0 + std::abs(f.domain_min())));
  while (lo < center - 1e-6 && !(f.f(lo) < 1e100)) lo += 1.0;
  const double hi = center + 1.0;
  const int n = 512;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    const double v = lo + (hi - lo) * i / (n - 1);
    const double Fv = f.F(v);
    const double fv = f.f(v);
    ys[i] = (q - f.phi(v)) / (Fv * fv);
    xs[i] = v;
  }
  return std::make_shared<CubicSpline>(std::move(xs), std::move(ys));
}

struct SeriesStart {
  double r_ser = 0.0;
  double c2 = 0.0, s2 = 0.0, s4 = 0.0;
  double r_unit = 1.0;
};

SeriesStart make_series(const Nonlinearity& f, int N, EquationKind eq,
                        double rho, double c_at_center, double tol,
                        double r_max) {
  const double f0 = f.f(rho);
  const double f1 = f.df(rho);
  const double f2 = f.d2f(rho);
  if (!(f0 > 0.0) || !std::isfinite(f0) || !std::isfinite(f1) ||
      !std::isfinite(f2))
    throw NumericError("series start: f, f', f'' not finite at center " +
                       std::to_string(rho));
  SeriesStart s;
  const double scale = std::max(std::abs(rho), 1.0);
  s.c2 = -f0 / (2.0 * N);
  s.r_unit = std::sqrt(2.0 * N * scale / f0);

  double ln_abs_s4;
  if (eq == EquationKind::Original) {
    s.s2 = -f1 / (4.0 * (N + 2.0));
    const double f2c2 = f2 * s.c2;
    if (!std::isfinite(f2c2) || !std::isfinite(f1 * s.s2))
      throw NumericError("series start: center value too large (f''*f overflow)");
    s.s4 = -(f1 * s.s2 + 0.5 * f2c2) / (6.0 * (N + 4.0));
    ln_abs_s4 = std::log(std::abs(s.s4) + 1e-300);
  } else {
    // gradient term contributes at the r^2 level of u''
    const double c4 =
        (f0 * f1 / (2.0 * N) - c_at_center * f0 * f0 / (N * N)) /
        (4.0 * (N + 2.0));
    s.s2 = c4 / s.c2;
    const double c6_reg = -(f1 * c4 + 0.5 * f2 * s.c2 * s.c2) /
                          (6.0 * (N + 4.0));
    const double extra =
        std::abs(c_at_center) *
        (f0 * f0 * (std::abs(f1) + 1.0) +
         std::abs(c_at_center) * f0 * f0 * f0) /
        (6.0 * (N + 4.0) * N * N);
    const double c6_est = 4.0 * (std::abs(c6_reg) + extra) + 1e-300;
    s.s4 = c6_reg / s.c2;
    ln_abs_s4 = std::log(c6_est / std::abs(s.c2));
  }

  // r_ser from the dropped-term rules |c6| r^6 <= tol_ser*scale and
  // 3 |c6/c2| r^4 <= tol_ser.  tol_ser ~ tol^{3/2} keeps the start error
  // strictly below the capped integrator's tol^{5/2} share; logs so huge
  // centers stay in range.
  const double ln_tol = 1.5 * std::log(tol) - std::log(8.0);
  const double ln_val =
      (ln_tol + std::log(scale) - (std::log(std::abs(s.c2) + 1e-300) +
                                   ln_abs_s4)) /
      6.0;
  const double ln_der = (ln_tol - std::log(3.0) - ln_abs_s4) / 4.0;
  double r_ser = std::exp(std::min(ln_val, ln_der));
  r_ser = std::min(r_ser, 0.1 * s.r_unit);
  if (rho > 0.0) {
    const double r_zero = std::sqrt(2.0 * N * rho / f0);
    r_ser = std::min(r_ser, 0.25 * r_zero);
  }
  r_ser = std::min(r_ser, 0.5 * r_max);
  s.r_ser = r_ser;
  return s;
}

// Crossing of u(r) = level inside one step, refined on the cubic Hermite.
double refine_crossing(double r0, double u0, double du0, double r1, double u1,
                       double du1, double level) {
  CubicPiece c{r0, r1, u0, du0, u1, du1};
  double a = r0, b = r1;
  double fa = u0 - level;
  for (int i = 0; i < 90; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = c.value(m) - level;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if (b - a <= 1e-13 * std::max(1.0, std::abs(m))) break;
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 2; ++it) {
    const double d = c.deriv(x);
    if (d != 0.0) {
      const double xn = x - (c.value(x) - level) / d;
      if (xn > r0 && xn < r1) x = xn;
    }
  }
  return x;
}

}  // namespace

double RadialSolution::gradient_coeff(double uval) const {
  if (equation == EquationKind::Original) return 0.0;
  if (!cterm) return 0.0;  // exact F f' == q families
  return (*cterm)(uval);
}

double RadialSolution::rhs_ddu(double radius, double uval, double duval) const {
  double d = -(N - 1) / radius * duval - f.f(uval);
  if (equation == EquationKind::Limit)
    d -= gradient_coeff(uval) * duval * duval;
  return d;
}

RadialSolution::Point RadialSolution::eval(double radius) const {
  if (!(radius >= 0.0) || radius > r.back() * (1.0 + 1e-12))
    throw PreconditionError("eval: radius " + std::to_string(radius) +
                            " outside [0," + std::to_string(r.back()) + "]");
  radius = std::min(radius, r.back());
  if (has_center && radius <= r_series_end) {
    const double r2 = radius * radius;
    const double corr = 1.0 + ser_s2 * r2 + ser_s4 * r2 * r2;
    Point p;
    p.u = center_value + ser_c2 * r2 * corr;
    p.du = ser_c2 * radius * (2.0 + 4.0 * ser_s2 * r2 + 6.0 * ser_s4 * r2 * r2);
    return p;
  }
  if (radius <= r.front()) {
    if (radius >= r.front() * (1.0 - 1e-12))
      return {u.front(), du.front()};
    if (!has_center)
      throw PreconditionError("eval: radius below the first grid node");
    // pseudo-interval [0, r0] for transformed grids without a series region
    QuinticPiece qp{0.0,
                    r.front(),
                    center_value,
                    0.0,
                    -f.f(center_value) / N,
                    u.front(),
                    du.front(),
                    rhs_ddu(r.front(), u.front(), du.front())};
    return {qp.value(radius), qp.deriv(radius)};
  }
  const auto it = std::upper_bound(r.begin(), r.end(), radius);
  std::size_t i = static_cast<std::size_t>(it - r.begin());
  if (i == 0) i = 1;
  if (i >= r.size()) i = r.size() - 1;
  const std::size_t j = i - 1;
  QuinticPiece qp{r[j],  r[i],  u[j], du[j], rhs_ddu(r[j], u[j], du[j]),
                  u[i],  du[i], rhs_ddu(r[i], u[i], du[i])};
  return {qp.value(radius), qp.deriv(radius)};
}

namespace {

RadialSolution run_integration(RadialSolution sol, double r_start,
                               double u_start, double du_start,
                               const ShootOpts& opts, double r_unit) {
  const Nonlinearity& f = sol.f;
  const int N = sol.N;
  const bool f11 = f.domain_class() == DomainClass::F11 && !f.extended();
  const bool stop_zero =
      opts.stop_at_first_zero || (f11 && opts.detect_zero);
  const double dom_min = f.domain_min();

  auto rhs = [&sol, N](double rr, const Vec2& y) -> Vec2 {
    Vec2 d;
    d.a = y.b;
    d.b = sol.rhs_ddu(rr, y.a, y.b);
    return d;
  };

  RkOpts ro;
  ro.tol = opts.tol;
  ro.cap_factor = opts.cap_factor;
  ro.x_unit = r_unit;
  ro.scale_a = std::max(std::abs(u_start), 1.0);
  ro.scale_b = std::max(std::abs(du_start), ro.scale_a / r_unit);

  sol.r.push_back(r_start);
  sol.u.push_back(u_start);
  sol.du.push_back(du_start);

  bool done = false;
  auto on_step = [&](double r0, const Vec2& y0, const Vec2&, double r1,
                     const Vec2& y1, const Vec2&) -> bool {
    // first-zero bookkeeping
    if (opts.detect_zero && !sol.first_zero && y0.a > 0.0 && y1.a <= 0.0) {
      const double rz =
          refine_crossing(r0, y0.a, y0.b, r1, y1.a, y1.b, 0.0);
      sol.first_zero = rz;
      if (stop_zero) {
        CubicPiece c{r0, r1, y0.a, y0.b, y1.a, y1.b};
        sol.r.push_back(rz);
        sol.u.push_back(c.value(rz));
        sol.du.push_back(c.deriv(rz));
        sol.termination = Termination::FirstZero;
        done = true;
        return false;
      }
    }
    if (opts.stop_at_level && y0.a > *opts.stop_at_level &&
        y1.a <= *opts.stop_at_level) {
      const double L = *opts.stop_at_level;
      const double rz = refine_crossing(r0, y0.a, y0.b, r1, y1.a, y1.b, L);
      CubicPiece c{r0, r1, y0.a, y0.b, y1.a, y1.b};
      sol.r.push_back(rz);
      sol.u.push_back(c.value(rz));
      sol.du.push_back(c.deriv(rz));
      sol.termination = Termination::ReachedLevel;
      done = true;
      return false;
    }
    if (opts.store_grid) {
      sol.r.push_back(r1);
      sol.u.push_back(y1.a);
      sol.du.push_back(y1.b);
      if (sol.r.size() > opts.max_nodes) {
        sol.termination = Termination::StepFailure;
        done = true;
        return false;
      }
    } else {
      // streaming mode keeps a two-node window
      sol.r.back() = r1;
      sol.u.back() = y1.a;
      sol.du.back() = y1.b;
    }
    if (std::isfinite(dom_min) &&
        y1.a <= dom_min + 1e-12 * (1.0 + std::abs(dom_min))) {
      sol.termination = Termination::BlowDown;
      done = true;
      return false;
    }
    return true;
  };

  RkStatus st = integrate_dopri5(rhs, r_start, Vec2{u_start, du_start},
                                 opts.r_max, ro, on_step);
  if (!done) {
    if (st.reason == StopReason::ReachedEnd) {
      sol.termination = Termination::ReachedRmax;
    } else if (st.reason == StopReason::StepFailure) {
      const double gap = st.y_end.a - dom_min;
      sol.termination = (std::isfinite(dom_min) &&
                         gap < 0.01 * (1.0 + std::abs(st.y_end.a)))
                            ? Termination::BlowDown
                            : Termination::StepFailure;
    }
  }
  if (!opts.store_grid && sol.r.size() == 1) {
    // keep at least the end state distinct from the start
    sol.r.push_back(st.x_end);
    sol.u.push_back(st.y_end.a);
    sol.du.push_back(st.y_end.b);
  }
  return sol;
}

RadialSolution shoot_from_center(const Nonlinearity& f, int N,
                                 EquationKind eq, double q, double center,
                                 const ShootOpts& opts) {
  if (!(opts.tol >= 1e-13 && opts.tol <= 1e-3))
    throw PreconditionError("tol out of range [1e-13,1e-3]");
  if (!(opts.r_max > 0.0)) throw PreconditionError("r_max must be positive");
  RadialSolution sol;
  sol.equation = eq;
  sol.N = N;
  sol.q = q;
  sol.f = f;
  sol.has_center = true;
  sol.center_value = center;
  sol.tol = opts.tol;
  if (eq == EquationKind::Limit) sol.cterm = build_cterm(f, q, center);

  const double c0 = eq == EquationKind::Limit
                        ? sol.gradient_coeff(center)
                        : 0.0;
  SeriesStart s = make_series(f, N, eq, center, c0, opts.tol, opts.r_max);
  sol.r_series_end = s.r_ser;
  sol.ser_c2 = s.c2;
  sol.ser_s2 = s.s2;
  sol.ser_s4 = s.s4;
  const double r2 = s.r_ser * s.r_ser;
  const double u0 = center + s.c2 * r2 * (1.0 + s.s2 * r2 + s.s4 * r2 * r2);
  const double du0 =
      s.c2 * s.r_ser * (2.0 + 4.0 * s.s2 * r2 + 6.0 * s.s4 * r2 * r2);
  if (center == 0.0 && opts.detect_zero) sol.first_zero = 0.0;  // boundary
  return run_integration(std::move(sol), s.r_ser, u0, du0, opts, s.r_unit);
}

}  // namespace

RadialSolution shoot_regular(const Nonlinearity& f, int N, double rho,
                             const ShootOpts& opts) {
  if (N < 3) throw PreconditionError("shoot_regular requires N >= 3");
  if (rho <= f.domain_min())
    throw PreconditionError("center value outside the domain of f");
  return shoot_from_center(f, N, EquationKind::Original, 0.0, rho, opts);
}

RadialSolution shoot_limit(const Nonlinearity& f, int N, double q,
                           double sigma, const ShootOpts& opts) {
  if (N < 3) throw PreconditionError("shoot_limit requires N >= 3");
  if (sigma <= f.domain_min())
    throw PreconditionError("center value outside the domain of f");
  return shoot_from_center(f, N, EquationKind::Limit, q, sigma, opts);
}

RadialSolution integrate_radial_from(const Nonlinearity& f, int N,
                                     EquationKind eq, double q, double r0,
                                     double u0, double du0,
                                     const ShootOpts& opts) {
  if (!(r0 > 0.0) || !(opts.r_max > r0))
    throw PreconditionError("integrate_radial_from requires 0 < r0 < r_max");
  RadialSolution sol;
  sol.equation = eq;
  sol.N = N;
  sol.q = q;
  sol.f = f;
  sol.has_center = false;
  sol.center_value = std::numeric_limits<double>::quiet_NaN();
  sol.tol = opts.tol;
  if (eq == EquationKind::Limit) sol.cterm = build_cterm(f, q, u0);
  return run_integration(std::move(sol), r0, u0, du0, opts, r0);
}

double exact_limit_critical(const Nonlinearity& f, int N, double sigma,
                            double s) {
  const ExponentReport rep = classify(f, N);
  if (rep.regime != Regime::Critical)
    throw RegimeError("exact_limit_critical requires q = q_S (got regime " +
                      std::string(regime_name(rep.regime)) + ")");
  const double Fs = f.F(sigma);
  const double bracket = 1.0 + s * s / (4.0 * N * Fs);
  return f.F_inv(Fs * bracket * bracket);
}

double residual_norm_grid(const Nonlinearity& f, int N, EquationKind eq,
                          const std::vector<double>& r,
                          const std::vector<double>& u,
                          const std::vector<double>& du,
                          const RadialSolution* ode_ctx) {
  auto cfun = [&](double uu) {
    return ode_ctx ? ode_ctx->gradient_coeff(uu) : 0.0;
  };
  auto ddu_fun = [&](double rr, double uu, double dd) {
    double v = -(N - 1) / rr * dd - f.f(uu);
    if (eq == EquationKind::Limit) v -= cfun(uu) * dd * dd;
    return v;
  };
  // Spans are coarsened so the 1/h^2 second-derivative reconstruction stays
  // above its roundoff floor (kept below ~3e-7 of the f-normalized scale).
  double worst = 0.0;
  std::size_t i = 0;
  while (i + 1 < r.size()) {
    const double noise =
        30.0 * 2.2e-16 * std::max(1.0, std::abs(u[i])) /
        std::max(1.0, f.f(u[i]));
    const double need =
        std::max(2e-3 * r[i], std::sqrt(noise / 3e-7));
    std::size_t j = i + 1;
    while (j + 1 < r.size() && r[j] - r[i] < need) ++j;
    if (!(r[j] > r[i])) break;
    if (r[j] - r[i] < 0.5 * need) break;  // grid ends inside a noisy span
    QuinticPiece qp{r[i],  r[j],  u[i],  du[i], ddu_fun(r[i], u[i], du[i]),
                    u[j],  du[j], ddu_fun(r[j], u[j], du[j])};
    const double rm = 0.5 * (r[i] + r[j]);
    const double um = qp.value(rm);
    const double dm = qp.deriv(rm);
    double res = qp.deriv2(rm) + (N - 1) / rm * dm + f.f(um);
    if (eq == EquationKind::Limit) res += cfun(um) * dm * dm;
    res = std::abs(res) / std::max(1.0, f.f(um));
    worst = std::max(worst, res);
    i = j;
  }
  return worst;
}

double residual_norm(const Nonlinearity& f, const RadialSolution& sol) {
  // Node 0 sits at the series junction, so every interval is integrator
  // territory.
  return residual_norm_grid(f, sol.N, sol.equation, sol.r, sol.u, sol.du,
                            &sol);
}

std::shared_ptr<const CubicSpline> make_gradient_coeff_spline(
    const Nonlinearity& f, double q, double center) {
  return build_cterm(f, q, center);
}

double rho_direct_max(const Nonlinearity& f) {
  auto safe = [&](double rho) {
    if (rho <= f.domain_min()) return false;
    const double f0 = f.f(rho);
    const double f1 = f.df(rho);
    const double f2 = f.d2f(rho);
    return std::isfinite(f0) && std::isfinite(f1) && std::isfinite(f2) &&
           std::isfinite(f2 * f0) && std::isfinite(f1 * f1) && f0 > 0.0;
  };
  double lo = std::max(1.0, f.domain_min() + 1.0);
  if (!safe(lo)) return lo;
  double hi = lo;
  for (int i = 0; i < 400 && safe(hi * 2.0); ++i) hi *= 2.0;
  if (hi > 1e300) return 1e300;
  lo = hi;
  hi = hi * 2.0;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (lo + hi);
    if (safe(m))
      lo = m;
    else
      hi = m;
  }
  return lo;
}

void write_csv(const RadialSolution& sol, std::ostream& os) {
  os << "r,u,du\n";
  char buf[128];
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", sol.r[i], sol.u[i],
                  sol.du[i]);
    os << buf;
  }
}

}  // namespace suprad
