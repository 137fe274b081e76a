#include "suprad/singular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "suprad/errors.hpp"
#include "suprad/interp.hpp"
#include "suprad/rk.hpp"

namespace suprad {

namespace {

// Interpolant of F f' o F^-1 against ln W, W = k^-1 e^{2t}(1+x); keeps the
// correction-system right-hand side off the quadrature hot path.
CubicSpline build_phi_of_lnW(const Nonlinearity& f, double lnW_lo,
                             double lnW_hi) {
  const int n = 1024;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    const double lw = lnW_lo + (lnW_hi - lnW_lo) * i / (n - 1);
    const double u = f.F_inv(std::exp(lw));
    xs[i] = lw;
    ys[i] = f.phi(u);
  }
  return CubicSpline(std::move(xs), std::move(ys));
}

}  // namespace

void SingularSolution::theta_state(double tt, double& xx, double& yy) const {
  if (tt <= t.front()) {
    xx = x.front();
    yy = y.front();
    return;
  }
  if (tt >= t.back()) {
    xx = x.back();
    yy = y.back();
    return;
  }
  const auto it = std::upper_bound(t.begin(), t.end(), tt);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const std::size_t j = i - 1;
  const CubicPiece cx{t[j], t[i], x[j], y[j], x[i], y[i]};
  xx = cx.value(tt);
  yy = cx.deriv(tt);
}

SingularSolution::Point SingularSolution::eval(double r) const {
  if (!(r >= inner_radius() * (1.0 - 1e-12)))
    throw PreconditionError("eval_singular: r below e^{t_start}");
  if (r >= r_inner_end) return {outer.eval(r).u, outer.eval(r).du};
  const double tt = std::log(r);
  double xx, yy;
  theta_state(tt, xx, yy);
  const double W = (r * r / k) * (1.0 + xx);
  const double u = f.F_inv(W);
  const double du = -f.f(u) * (r / k) * (2.0 * (1.0 + xx) + yy);
  return {u, du};
}

double SingularSolution::theta(double r) const {
  if (r < r_inner_end) {
    double xx, yy;
    theta_state(std::log(r), xx, yy);
    return xx;
  }
  const double u = outer.eval(r).u;
  return k * f.F(u) / (r * r) - 1.0;
}

SingularSolution construct_singular(const Nonlinearity& f, int N, double q,
                                    const SingularOpts& opts) {
  if (N < 3) throw PreconditionError("construct_singular requires N >= 3");
  const double q_S = (N + 2) / 4.0;
  if (!(q < q_S - 1e-9))
    throw RegimeError("construct_singular requires q < q_S (got q=" +
                      std::to_string(q) + ", q_S=" + std::to_string(q_S) +
                      ")");

  SingularSolution sol;
  sol.f = f;
  sol.N = N;
  sol.q = q;
  sol.k = 2.0 * N - 4.0 * q;
  sol.eps_box = opts.eps_box;
  sol.tol = opts.tol;

  const double b = N + 2.0 - 4.0 * q;  // trace of the linear part
  sol.diag.D = b * b - 4.0 * sol.k;
  const std::complex<double> sqrtD =
      std::sqrt(std::complex<double>(sol.diag.D, 0.0));
  sol.diag.lambda_plus = (b + sqrtD) / 2.0;
  sol.diag.lambda_minus = (b - sqrtD) / 2.0;
  if (!(sol.diag.lambda_plus.real() > 0.0) ||
      !(sol.diag.lambda_minus.real() > 0.0))
    throw RegimeError("construct_singular: Re(lambda) > 0 fails; forward "
                      "integration unstable");
  const double q_JL = (N - 2.0 * std::sqrt(N - 1.0)) / 4.0;
  if (q < q_JL - 1e-9)
    sol.diag.mu_decay = (b - std::sqrt(sol.diag.D)) / 2.0;
  else if (q <= q_JL + 1e-9)
    sol.diag.mu_decay = b / 2.0 - 0.01;
  else
    sol.diag.mu_decay = b / 2.0;

  // Switch before u* drops to the C^2 floor, and also before F f' leaves a
  // small neighbourhood of q: the correction system is contractive only
  // while the forcing (F f' - q) stays small.
  double u_switch =
      std::max({f.u_c2_floor(), f.domain_min() + 1e-6, 1.0});
  constexpr double kDeltaSwitch = 0.02;
  for (int i = 0; i < 60 && std::abs(f.phi(u_switch) - q) > kDeltaSwitch;
       ++i) {
    if (!(f.f(u_switch * 2.0) < 1e290)) break;
    u_switch *= 2.0;
  }
  const double F_floor = f.F(u_switch);
  const double t_sw_est = 0.5 * std::log(sol.k * F_floor);

  // Asymptotic start: walk t down until |F f' - q| <= delta_q, or take the
  // floor and record the honest gap.
  const double margin = std::max(8.0, 6.0 / sol.diag.mu_decay + 2.0);
  auto gap_at = [&](double tt) {
    const double W = std::exp(2.0 * tt) / sol.k;
    return std::abs(f.phi(f.F_inv(W)) - q);
  };
  double t_start = t_sw_est - margin;
  if (opts.t_start_cap < 0.0) t_start = std::min(t_start, opts.t_start_cap);
  t_start = std::max(t_start, opts.t_floor);
  double gap = gap_at(t_start);
  if (gap > opts.delta_q) {
    // |F f' - q| decreases toward t = -inf; bisect for the shallowest
    // admissible start, or take the floor with its honest gap.
    const double gap_floor = gap_at(opts.t_floor);
    if (gap_floor > opts.delta_q) {
      t_start = opts.t_floor;
      gap = gap_floor;
    } else {
      double hi = t_start, lo = opts.t_floor;
      for (int i = 0; i < 60 && hi - lo > 0.5; ++i) {
        const double m = 0.5 * (lo + hi);
        (gap_at(m) > opts.delta_q ? hi : lo) = m;
      }
      t_start = lo;
      gap = gap_at(lo);
    }
  }
  sol.t_start = t_start;
  sol.diag.phi_gap_at_start = gap;
  if (t_start > t_sw_est - 2.0)
    throw NumericError("construct_singular: no room between t_start and the "
                       "switch point");

  // Forward integration of x' = y, y' = -(N+2-4q)y - k x + q y^2/(1+x)
  //                                   + (Phi - q)(y+2x+2)^2/(1+x).
  const bool exact = f.phi_exact();
  CubicSpline phi_spline;
  if (!exact) {
    const double lo = 2.0 * t_start - std::log(sol.k) - 0.5;
    const double hi = 2.0 * t_sw_est - std::log(sol.k) + 0.5;
    phi_spline = build_phi_of_lnW(f, lo, hi);
  }
  auto phi_at = [&](double tt, double xx) {
    if (exact) return q;
    const double lnW = 2.0 * tt - std::log(sol.k) + std::log1p(xx);
    return phi_spline(lnW);
  };
  auto rhs = [&](double tt, const Vec2& s) -> Vec2 {
    const double xx = s.a, yy = s.b;
    const double phi = phi_at(tt, xx);
    Vec2 d;
    d.a = yy;
    d.b = -b * yy - sol.k * xx + q * yy * yy / (1.0 + xx) +
          (phi - q) * (yy + 2.0 * xx + 2.0) * (yy + 2.0 * xx + 2.0) /
              (1.0 + xx);
    return d;
  };

  sol.t.push_back(t_start);
  sol.x.push_back(0.0);
  sol.y.push_back(0.0);
  bool box_exit = false;
  double switch_t = t_sw_est;
  bool switched = false;
  auto on_step = [&](double, const Vec2&, const Vec2&, double t1,
                     const Vec2& s1, const Vec2&) -> bool {
    sol.t.push_back(t1);
    sol.x.push_back(s1.a);
    sol.y.push_back(s1.b);
    if (std::abs(s1.a) > opts.eps_box || std::abs(s1.b) > opts.eps_box) {
      box_exit = true;
      return false;
    }
    const double W = std::exp(2.0 * t1) / sol.k * (1.0 + s1.a);
    if (W >= F_floor) {
      switch_t = t1;
      switched = true;
      return false;
    }
    return true;
  };

  RkOpts ro;
  ro.tol = opts.tol;
  ro.cap_factor = opts.cap_factor;
  ro.cap_scale_with_x = false;
  ro.x_unit = 1.0;
  ro.scale_a = 1.0;
  ro.scale_b = 1.0;
  const RkStatus st = integrate_dopri5(rhs, t_start, Vec2{0.0, 0.0},
                                       t_sw_est + 1.0, ro, on_step);
  if (box_exit)
    throw NumericError(
        "construct_singular: (x,y) left the containment box at t=" +
        std::to_string(sol.t.back()) +
        " (t_start too late or (f2) marginal)");
  if (!switched && st.reason != StopReason::ReachedEnd)
    throw NumericError("construct_singular: correction system step failure");
  if (!switched) switch_t = st.x_end;
  sol.t_switch = switch_t;

  // Hand off one t-unit early so the representations overlap.
  const double t_ol = switch_t - 1.0;
  double x_ol, y_ol;
  sol.theta_state(t_ol, x_ol, y_ol);
  const double r_ol = std::exp(t_ol);
  const double W_ol = r_ol * r_ol / sol.k * (1.0 + x_ol);
  const double u_ol = f.F_inv(W_ol);
  const double du_ol =
      -f.f(u_ol) * (r_ol / sol.k) * (2.0 * (1.0 + x_ol) + y_ol);

  ShootOpts so;
  so.tol = std::max(opts.tol, 1e-12);
  so.r_max = opts.r_max;
  so.detect_zero = true;
  so.stop_at_first_zero = true;
  so.cap_factor = opts.outer_cap_factor;
  sol.outer =
      integrate_radial_from(f, N, EquationKind::Original, q, r_ol, u_ol,
                            du_ol, so);
  sol.r_inner_end = r_ol;
  sol.r0_star = sol.outer.first_zero;

  // Overlap consistency between the theta-map and the outer leg.
  double worst = 0.0;
  for (int i = 1; i <= 8; ++i) {
    const double tt = t_ol + i * (switch_t - t_ol) / 8.0;
    const double rr = std::exp(tt);
    if (rr > sol.outer.back_radius()) break;
    double xx, yy;
    sol.theta_state(tt, xx, yy);
    const double ui = f.F_inv(rr * rr / sol.k * (1.0 + xx));
    const double uo = sol.outer.eval(rr).u;
    worst = std::max(worst,
                     std::abs(ui - uo) / std::max(1.0, std::abs(uo)));
  }
  sol.diag.overlap_gap = worst;
  if (worst > 1e-6)
    throw NumericError(
        "construct_singular: inner/outer overlap mismatch " +
        std::to_string(worst));
  return sol;
}

double exact_singular_limit(const Nonlinearity& f, int N, double q,
                            double s) {
  const double k = 2.0 * N - 4.0 * q;
  if (!(k > 0.0))
    throw RegimeError("exact_singular_limit requires k = 2N - 4q > 0");
  return f.F_inv(s * s / k);
}

void write_csv(const SingularSolution& sol, std::ostream& os) {
  os << "r,theta,u_star,du_star\n";
  const double ratio = std::pow(10.0, 1.0 / 32.0);
  const double r_end = sol.outer.back_radius();
  char buf[160];
  for (double r = sol.inner_radius(); r <= r_end; r *= ratio) {
    const auto p = sol.eval(r);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r,
                  sol.theta(r), p.u, p.du);
    os << buf;
  }
  return;
}

}  // namespace suprad
