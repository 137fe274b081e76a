#ifndef SUPRAD_TRANSFORMS_HPP
#define SUPRAD_TRANSFORMS_HPP

#include "suprad/nonlinearity.hpp"
#include "suprad/radial_ode.hpp"

namespace suprad {

// The reference family f_q: u^p (p = q/(q-1)) for q > 1, e^u for q = 1,
// with closed-form F_q and inverse.
struct ReferenceNonlinearity {
  double q = 1.0;
  double p = 0.0;  // +inf when q == 1

  bool exponential() const;
  double f(double w) const;
  double F(double w) const;
  double F_inv(double s) const;
  Nonlinearity as_nonlinearity() const;  // builtin power(p, a=0) or exp
};

ReferenceNonlinearity make_reference(double q);

// v(s) = F^-1[lambda^-2 F(u(lambda s))], s = r/lambda, on the stored grid;
// derivative transported by the chain rule.  Result is tagged as a
// Limit-equation trajectory.
RadialSolution similarity_rescale(const Nonlinearity& f,
                                  const RadialSolution& sol, double lambda);

// w = F_q^-1[F(v)] turning a Limit trajectory into a trajectory of
// Delta w + f_q(w) = 0 for the reference family.
RadialSolution cole_hopf_forward(const Nonlinearity& f, double q,
                                 const RadialSolution& sol);

// v = F^-1[F_q(w)], the inverse value map.
RadialSolution cole_hopf_inverse(const Nonlinearity& f, double q,
                                 const RadialSolution& sol);

struct ColeHopfReport {
  double max_residual = 0.0;
  double tau = 0.0;      // w(0) = F_q^-1[F(sigma)]
  double tau_gap = 0.0;  // relative  |F_q(tau) - F(sigma)| / F(sigma)
  RadialSolution w;
};

// Shoots the limit problem, transforms, and measures the residual of the
// reference equation on the transformed grid.
ColeHopfReport verify_cole_hopf(const Nonlinearity& f, int N, double q,
                                double sigma, const ShootOpts& opts = {});

}  // namespace suprad

#endif
