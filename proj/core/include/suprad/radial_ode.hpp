#ifndef SUPRAD_RADIAL_ODE_HPP
#define SUPRAD_RADIAL_ODE_HPP

#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "suprad/interp.hpp"
#include "suprad/nonlinearity.hpp"

namespace suprad {

enum class EquationKind { Original, Limit };
enum class Termination { ReachedRmax, FirstZero, BlowDown, StepFailure,
                         ReachedLevel };

struct ShootOpts {
  double tol = 1e-9;
  double r_max = 1e3;
  bool detect_zero = true;
  bool stop_at_first_zero = false;  // forced for F11 domains
  std::optional<double> stop_at_level;
  double cap_factor = 1.0;  // step cap factor; see rk.hpp
  bool store_grid = true;
  std::size_t max_nodes = 8'000'000;
};

// One radial trajectory: accepted integrator nodes plus the power-series
// start that removes the r = 0 coordinate singularity.  Between nodes the
// profile is reconstructed with a quintic Hermite whose end second
// derivatives come from the governing equation.
class RadialSolution {
 public:
  EquationKind equation = EquationKind::Original;
  int N = 3;
  double q = 0.0;  // Limit-equation exponent (unused for Original)
  Nonlinearity f;
  bool has_center = false;
  double center_value = 0.0;
  double tol = 1e-9;

  // series region [0, r_series_end]: u = rho + c2 r^2 (1 + s2 r^2 + s4 r^4)
  double r_series_end = 0.0;
  double ser_c2 = 0.0, ser_s2 = 0.0, ser_s4 = 0.0;

  std::vector<double> r, u, du;
  std::optional<double> first_zero;
  Termination termination = Termination::ReachedRmax;

  // c(v) = (q - F f')/(F f) interpolant for Limit equations of families
  // without the exact F f' == q identity.
  std::shared_ptr<const CubicSpline> cterm;

  struct Point {
    double u = 0.0, du = 0.0;
  };
  Point eval(double radius) const;
  double gradient_coeff(double uval) const;  // c(u); 0 for Original
  double rhs_ddu(double radius, double uval, double duval) const;
  double front_radius() const { return r.front(); }
  double back_radius() const { return r.back(); }
};

RadialSolution shoot_regular(const Nonlinearity& f, int N, double rho,
                             const ShootOpts& opts = {});

RadialSolution shoot_limit(const Nonlinearity& f, int N, double q,
                           double sigma, const ShootOpts& opts = {});

// Integration started away from the center (singular-solution outer leg,
// master trajectories).  No series region; the node (r0,u0,du0) is first.
RadialSolution integrate_radial_from(const Nonlinearity& f, int N,
                                     EquationKind eq, double q, double r0,
                                     double u0, double du0,
                                     const ShootOpts& opts = {});

// Closed-form critical-case limit solution F^-1[F(sigma)(1+s^2/(4N
// F(sigma)))^2].  Requires the Critical regime.
double exact_limit_critical(const Nonlinearity& f, int N, double sigma,
                            double s);

// Max over step midpoints of the scaled equation residual.
double residual_norm(const Nonlinearity& f, const RadialSolution& sol);

// Same residual on an externally supplied (r,u,du) grid.
double residual_norm_grid(const Nonlinearity& f, int N, EquationKind eq,
                          const std::vector<double>& r,
                          const std::vector<double>& u,
                          const std::vector<double>& du,
                          const RadialSolution* ode_ctx = nullptr);

// Largest center value whose series start stays within double range.
double rho_direct_max(const Nonlinearity& f);

// c(v) interpolant used by Limit-equation trajectories; exposed so value
// transforms can tag their outputs consistently.
std::shared_ptr<const CubicSpline> make_gradient_coeff_spline(
    const Nonlinearity& f, double q, double center);

// CSV export: header r,u,du with 17-significant-digit floats.
void write_csv(const RadialSolution& sol, std::ostream& os);

}  // namespace suprad

#endif
