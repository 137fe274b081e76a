#ifndef SUPRAD_QUADRATURE_HPP
#define SUPRAD_QUADRATURE_HPP

#include <functional>

namespace suprad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 7-15 on a finite interval.  Bisects the worst
// interval until abs_tol or rel_tol is met.  Throws nothing; the caller
// inspects `converged`.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol = 1e-13,
                              double rel_tol = 1e-13, int max_intervals = 4000);

// Convenience wrapper that throws NumericError on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-13, double rel_tol = 1e-13);

}  // namespace suprad

#endif
