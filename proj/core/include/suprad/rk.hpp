#ifndef SUPRAD_RK_HPP
#define SUPRAD_RK_HPP

#include <cmath>
#include <cstdint>
#include <functional>

namespace suprad {

struct Vec2 {
  double a = 0.0;
  double b = 0.0;
};

inline Vec2 operator+(Vec2 u, Vec2 v) { return {u.a + v.a, u.b + v.b}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.a, s * v.b}; }

enum class StopReason { ReachedEnd, CallbackStop, StepFailure };

struct RkOpts {
  double tol = 1e-9;
  // Step cap h <= cap_factor * sqrt(tol) * |x| (or * x_unit when the
  // variable carries no scale).  Ties the dense output and residual orders
  // to the requested tolerance.
  double cap_factor = 1.0;
  bool cap_scale_with_x = true;
  double x_unit = 1.0;
  // Characteristic magnitudes entering the error norm.
  double scale_a = 1.0;
  double scale_b = 1.0;
  double h_init = 0.0;  // 0 = automatic
  std::uint64_t max_steps = 100'000'000;
};

// Called after each accepted step with node data (state and rhs at both
// ends).  Return false to stop the run.
using StepCallback =
    std::function<bool(double x0, const Vec2& y0, const Vec2& f0, double x1,
                       const Vec2& y1, const Vec2& f1)>;

struct RkStatus {
  StopReason reason = StopReason::ReachedEnd;
  double x_end = 0.0;
  Vec2 y_end{};
  std::uint64_t steps = 0;
  std::uint64_t rejected = 0;
};

// Dormand-Prince 5(4) with FSAL, integrating forward from x0 to x1 > x0.
inline RkStatus integrate_dopri5(const std::function<Vec2(double, const Vec2&)>& rhs,
                                 double x0, const Vec2& y0_in, double x1,
                                 const RkOpts& opts, const StepCallback& on_step) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  RkStatus st;
  double x = x0;
  Vec2 y = y0_in;
  Vec2 k1 = rhs(x, y);
  const double tol = opts.tol;
  auto cap = [&](double xx) {
    const double scale = opts.cap_scale_with_x
                             ? std::max(std::abs(xx), 1e-300)
                             : opts.x_unit;
    return opts.cap_factor * std::sqrt(tol) * scale;
  };
  double h = opts.h_init > 0 ? opts.h_init : 0.01 * cap(x0 + opts.x_unit);
  h = std::min(h, cap(x));
  h = std::min(h, x1 - x0);

  while (x < x1) {
    if (st.steps + st.rejected > opts.max_steps) {
      st.reason = StopReason::StepFailure;
      break;
    }
    h = std::min(h, x1 - x);
    const double hmin = 1e-14 * std::max(std::abs(x), opts.x_unit);
    if (h < hmin) {
      st.reason = StopReason::StepFailure;
      break;
    }

    const Vec2 k2 = rhs(x + c2 * h, y + h * (a21 * k1));
    const Vec2 k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec2 k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 =
        rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = rhs(
        x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec2 k7 = rhs(x + h, ynew);
    const Vec2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                          e7 * k7);

    const double sa = tol * (opts.scale_a + std::max(std::abs(y.a), std::abs(ynew.a)));
    const double sb = tol * (opts.scale_b + std::max(std::abs(y.b), std::abs(ynew.b)));
    double en = std::max(std::abs(err.a) / sa, std::abs(err.b) / sb);
    if (!std::isfinite(en) || !std::isfinite(ynew.a) || !std::isfinite(ynew.b))
      en = 1e10;

    if (en <= 1.0) {
      const double xnew = x + h;
      if (on_step && !on_step(x, y, k1, xnew, ynew, k7)) {
        x = xnew;
        y = ynew;
        st.reason = StopReason::CallbackStop;
        break;
      }
      x = xnew;
      y = ynew;
      k1 = k7;  // FSAL
      ++st.steps;
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
      fac = std::min(5.0, std::max(0.2, fac));
      h = std::min(h * fac, cap(x));
    } else {
      ++st.rejected;
      double fac = 0.9 * std::pow(en, -0.2);
      fac = std::min(1.0, std::max(0.1, fac));
      h *= fac;
    }
  }
  st.x_end = x;
  st.y_end = y;
  return st;
}

}  // namespace suprad

#endif
