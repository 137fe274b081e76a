#ifndef SUPRAD_ROOTS_HPP
#define SUPRAD_ROOTS_HPP

#include <functional>

namespace suprad {

// Bisection on [a,b] with phi(a)*phi(b) <= 0; refines until the bracket
// width is below abs_tol + rel_tol*|x|.  Returns the midpoint.
double bisect(const std::function<double(double)>& phi, double a, double b,
              double abs_tol, double rel_tol, int max_iter = 200);

// Safeguarded Newton inside a bracket [a,b]: Newton steps that leave the
// bracket or fail to shrink it fall back to bisection.  `fdf` returns the
// value and derivative.  Converges on |f| <= ftol or bracket width tol.
double newton_bisect(
    const std::function<void(double, double&, double&)>& fdf, double a,
    double b, double ftol, double xtol_rel, int max_iter = 100);

}  // namespace suprad

#endif
