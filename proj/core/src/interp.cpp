#include "suprad/interp.hpp"

#include <algorithm>
#include <cmath>

#include "suprad/errors.hpp"

namespace suprad {

namespace {
// Quintic two-point Hermite basis on tau in [0,1].
// H for the left end (value, h*deriv, h^2*deriv2), K for the right end.
inline void quintic_basis(double t, double h[3], double k[3]) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  h[0] = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  h[1] = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  h[2] = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  k[0] = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  k[1] = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  k[2] = 0.5 * t3 - t4 + 0.5 * t5;
}

inline void quintic_basis_d(double t, double h[3], double k[3]) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  h[0] = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
  h[1] = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
  h[2] = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
  k[0] = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
  k[1] = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
  k[2] = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
}

inline void quintic_basis_dd(double t, double h[3], double k[3]) {
  const double t2 = t * t, t3 = t2 * t;
  h[0] = -60.0 * t + 180.0 * t2 - 120.0 * t3;
  h[1] = -36.0 * t + 96.0 * t2 - 60.0 * t3;
  h[2] = 1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3;
  k[0] = 60.0 * t - 180.0 * t2 + 120.0 * t3;
  k[1] = -24.0 * t + 84.0 * t2 - 60.0 * t3;
  k[2] = 3.0 * t - 12.0 * t2 + 10.0 * t3;
}
}  // namespace

double QuinticPiece::value(double x) const {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  double a[3], b[3];
  quintic_basis(t, a, b);
  return u0 * a[0] + h * du0 * a[1] + h * h * ddu0 * a[2] + u1 * b[0] +
         h * du1 * b[1] + h * h * ddu1 * b[2];
}

double QuinticPiece::deriv(double x) const {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  double a[3], b[3];
  quintic_basis_d(t, a, b);
  return (u0 * a[0] + h * du0 * a[1] + h * h * ddu0 * a[2] + u1 * b[0] +
          h * du1 * b[1] + h * h * ddu1 * b[2]) /
         h;
}

double QuinticPiece::deriv2(double x) const {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  double a[3], b[3];
  quintic_basis_dd(t, a, b);
  return (u0 * a[0] + h * du0 * a[1] + h * h * ddu0 * a[2] + u1 * b[0] +
          h * du1 * b[1] + h * h * ddu1 * b[2]) /
         (h * h);
}

double CubicPiece::value(double x) const {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return u0 * (2 * t3 - 3 * t2 + 1) + h * du0 * (t3 - 2 * t2 + t) +
         u1 * (-2 * t3 + 3 * t2) + h * du1 * (t3 - t2);
}

double CubicPiece::deriv(double x) const {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return (u0 * (6 * t2 - 6 * t) + h * du0 * (3 * t2 - 4 * t + 1) +
          u1 * (-6 * t2 + 6 * t) + h * du1 * (3 * t2 - 2 * t)) /
         h;
}

double CubicPiece::deriv2(double x) const {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  return (u0 * (12 * t - 6) + h * du0 * (6 * t - 4) + u1 * (6 - 12 * t) +
          h * du1 * (6 * t - 2)) /
         (h * h);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size() || n < 2)
    throw NumericError("CubicSpline: need >= 2 matching nodes");
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Tridiagonal solve for natural spline second derivatives.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double rhs =
        6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
    c[i] = h1 / diag;
    d[i] = (rhs - h0 * d[i - 1]) / diag;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

double CubicSpline::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

}  // namespace suprad
