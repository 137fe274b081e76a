#ifndef SUPRAD_SINGULAR_HPP
#define SUPRAD_SINGULAR_HPP

#include <complex>
#include <optional>
#include <ostream>
#include <vector>

#include "suprad/nonlinearity.hpp"
#include "suprad/radial_ode.hpp"

namespace suprad {

struct SingularDiagnostics {
  double D = 0.0;  // (N+2-4q)^2 - 4(2N-4q)
  std::complex<double> lambda_plus{}, lambda_minus{};
  double mu_decay = 0.0;
  double phi_gap_at_start = 0.0;  // |F f' - q| at u*(e^{t_start})
  double overlap_gap = 0.0;       // inner/outer mismatch on the handoff window
};

struct SingularOpts {
  double delta_q = 1e-8;  // target |F f' - q| at the asymptotic start
  double eps_box = 0.1;   // containment box for (x, y)
  double t_floor = -300.0;
  double t_start_cap = 0.0;  // force t_start <= this when negative
  double tol = 1e-10;
  double r_max = 1e3;
  double cap_factor = 30.0;        // inner stepping in t
  double outer_cap_factor = 1.0;   // outward radial leg
};

// u*(r) = F^-1[k^-1 r^2 (1 + theta(r))] assembled from the log-variable
// correction system near r = 0 and a direct outward integration.
class SingularSolution {
 public:
  Nonlinearity f;
  int N = 3;
  double q = 1.0, k = 0.0;
  std::vector<double> t, x, y;  // theta grid in t = log r
  double t_start = 0.0, t_switch = 0.0;
  RadialSolution outer;       // starts one t-unit before the switch
  double r_inner_end = 0.0;   // outer.front_radius()
  std::optional<double> r0_star;
  SingularDiagnostics diag;
  double eps_box = 0.1, tol = 1e-10;

  struct Point {
    double u = 0.0, du = 0.0;
  };
  Point eval(double r) const;      // valid on [e^{t_start}, grid end]
  double theta(double r) const;    // x(log r) inner, k F(u)/r^2 - 1 outer
  double inner_radius() const { return std::exp(t_start); }
  double outer_radius() const { return outer.back_radius(); }

  // (x, y) interpolated on the theta grid
  void theta_state(double tt, double& xx, double& yy) const;
};

SingularSolution construct_singular(const Nonlinearity& f, int N, double q,
                                    const SingularOpts& opts = {});

// Exact singular solution of the limit equation, F^-1[k^-1 s^2].
double exact_singular_limit(const Nonlinearity& f, int N, double q, double s);

// CSV export `r,theta,u_star,du_star` on a geometric grid of ratio 10^{1/32}.
void write_csv(const SingularSolution& sol, std::ostream& os);

}  // namespace suprad

#endif
