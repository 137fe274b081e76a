#include "suprad/roots.hpp"

#include <cmath>

#include "suprad/errors.hpp"

namespace suprad {

double bisect(const std::function<double(double)>& phi, double a, double b,
              double abs_tol, double rel_tol, int max_iter) {
  double fa = phi(a);
  double fb = phi(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw NumericError("bisect: root not bracketed");
  for (int i = 0; i < max_iter; ++i) {
    const double m = 0.5 * (a + b);
    if (b - a <= abs_tol + rel_tol * std::abs(m)) return m;
    const double fm = phi(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double newton_bisect(const std::function<void(double, double&, double&)>& fdf,
                     double a, double b, double ftol, double xtol_rel,
                     int max_iter) {
  double fa, fb, d;
  fdf(a, fa, d);
  fdf(b, fb, d);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw NumericError("newton_bisect: root not bracketed");
  double x = 0.5 * (a + b);
  for (int i = 0; i < max_iter; ++i) {
    double fx, dfx;
    fdf(x, fx, dfx);
    if (std::abs(fx) <= ftol) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    bool used_newton = false;
    if (dfx != 0.0 && std::isfinite(dfx)) {
      const double xn = x - fx / dfx;
      if (xn > a && xn < b) {
        x = xn;
        used_newton = true;
      }
    }
    if (!used_newton) x = 0.5 * (a + b);
    if (b - a <= xtol_rel * std::abs(x) + 1e-300) return x;
  }
  return x;
}

}  // namespace suprad
