#ifndef SUPRAD_BIFURCATION_HPP
#define SUPRAD_BIFURCATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "suprad/nonlinearity.hpp"
#include "suprad/radial_ode.hpp"
#include "suprad/singular.hpp"

namespace suprad {

// C^1 positive extension of an (f1')-nonlinearity below u = 0: unchanged on
// [0,inf), monotone piecewise-cubic descent to delta/2 on [-1,0], constant
// below.  `alt_shape` picks a different interior knot; computed mu values
// must not depend on the choice.
Nonlinearity extend_nonlinearity(const Nonlinearity& f, bool alt_shape = false);

// Human-readable description of the extension (delta, knots).
std::string extension_record(const Nonlinearity& f_ext);

struct MuResult {
  double mu = 0.0;
  double r0 = 0.0;
};

// mu(rho) = r0(rho)^2 by shooting to the first zero.  Center values beyond
// the direct series range are handled through the exact similarity
// composition for families with F f' == q identically.
MuResult mu_of_rho(const Nonlinearity& f_ext, int N, double rho,
                   const ShootOpts& opts = {});

// (r0*)^2 for the singular solution.
double mu_star(const Nonlinearity& f_ext, int N, const SingularOpts& opts = {});

struct BifSample {
  double rho = 0.0;
  double mu = 0.0;
  double r0 = 0.0;
  double dmu_drho = 0.0;
  bool ok = false;
  std::string error;
};

struct BifurcationCurve {
  int N = 0;
  std::string f_spec;
  std::string ext_record;
  std::vector<BifSample> samples;
  std::optional<double> mu_star;
  std::vector<double> turning_points;
  int crossings_of_mu_star = 0;
  std::string classification;  // Oscillatory-consistent | Monotone-consistent
                               // | Indeterminate
};

struct SweepOpts {
  double rho_min = 1e-2;
  double rho_max = 1e3;
  int points = 200;
  int jobs = 1;
  double tol = 1e-9;
  double cap_factor = 8.0;
  bool compute_mu_star = true;
};

BifurcationCurve sweep_curve(const Nonlinearity& f, int N,
                             const SweepOpts& opts = {});

}  // namespace suprad

#endif
