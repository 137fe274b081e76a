#ifndef SUPRAD_INTERP_HPP
#define SUPRAD_INTERP_HPP

#include <vector>

namespace suprad {

// Two-point quintic Hermite on [x0,x1] matching value, first and second
// derivative at both ends.  Evaluation is exact for quintics; the second
// derivative of the interpolant is what residual checks consume.
struct QuinticPiece {
  double x0, x1;
  double u0, du0, ddu0;
  double u1, du1, ddu1;

  double value(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
};

// Cubic Hermite on [x0,x1] (value + first derivative at both ends).
struct CubicPiece {
  double x0, x1;
  double u0, du0;
  double u1, du1;

  double value(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
};

// Natural cubic spline through (x_i, y_i), x strictly increasing.
// Clamped to endpoint values outside the node range.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  bool empty() const { return x_.empty(); }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at nodes
};

}  // namespace suprad

#endif
