#include "suprad/transforms.hpp"

#include <cmath>
#include <limits>

#include "suprad/errors.hpp"

namespace suprad {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQTol = 1e-9;

double require_q(const Nonlinearity& f) {
  if (auto q = f.q_analytic()) return *q;
  return estimate_q(f).q;
}
}  // namespace

bool ReferenceNonlinearity::exponential() const {
  return std::abs(q - 1.0) <= kQTol;
}

double ReferenceNonlinearity::f(double w) const {
  return exponential() ? std::exp(w) : std::pow(w, p);
}

double ReferenceNonlinearity::F(double w) const {
  return exponential() ? std::exp(-w) : std::pow(w, 1.0 - p) / (p - 1.0);
}

double ReferenceNonlinearity::F_inv(double s) const {
  if (!(s > 0.0))
    throw PreconditionError("ReferenceNonlinearity::F_inv requires s > 0");
  return exponential() ? -std::log(s)
                       : std::pow((p - 1.0) * s, -1.0 / (p - 1.0));
}

Nonlinearity ReferenceNonlinearity::as_nonlinearity() const {
  return exponential() ? make_exp() : make_power(p, 0.0);
}

ReferenceNonlinearity make_reference(double q) {
  if (!(q >= 1.0 - kQTol))
    throw PreconditionError("reference family requires q >= 1");
  ReferenceNonlinearity r;
  r.q = q;
  r.p = std::abs(q - 1.0) <= kQTol ? kInf : q / (q - 1.0);
  return r;
}

RadialSolution similarity_rescale(const Nonlinearity& f,
                                  const RadialSolution& sol, double lambda) {
  if (sol.equation != EquationKind::Original)
    throw PreconditionError(
        "similarity_rescale expects an Original-equation trajectory");
  if (!(lambda > 0.0))
    throw PreconditionError("similarity_rescale requires lambda > 0");
  const double q = require_q(f);
  const double il2 = 1.0 / (lambda * lambda);

  RadialSolution out;
  out.equation = EquationKind::Limit;
  out.N = sol.N;
  out.q = q;
  out.f = f;
  out.tol = sol.tol;
  out.termination = sol.termination;
  out.r.reserve(sol.r.size());
  out.u.reserve(sol.r.size());
  out.du.reserve(sol.r.size());
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double Fu = f.F(sol.u[i]);
    const double v = f.F_inv(il2 * Fu);
    const double dv = f.f(v) * sol.du[i] / (lambda * f.f(sol.u[i]));
    out.r.push_back(sol.r[i] / lambda);
    out.u.push_back(v);
    out.du.push_back(dv);
  }
  if (sol.has_center) {
    out.has_center = true;
    out.center_value = f.F_inv(il2 * f.F(sol.center_value));
    out.cterm = make_gradient_coeff_spline(f, q, out.center_value);
  } else {
    out.cterm = make_gradient_coeff_spline(f, q, out.u.front());
  }
  if (sol.first_zero) {
    out.first_zero = *sol.first_zero / lambda;
    // the value map moves the zero level unless F(0) maps to itself; keep
    // only the radius of the original sign change when levels coincide
    if (!(std::abs(il2 - 1.0) < 1e-15)) out.first_zero.reset();
  }
  return out;
}

RadialSolution cole_hopf_forward(const Nonlinearity& f, double q,
                                 const RadialSolution& sol) {
  if (sol.equation != EquationKind::Limit)
    throw PreconditionError(
        "cole_hopf_forward expects a Limit-equation trajectory");
  const ReferenceNonlinearity ref = make_reference(q);
  const bool use_lnF = ref.exponential();

  RadialSolution out;
  out.equation = EquationKind::Original;
  out.N = sol.N;
  out.q = 0.0;
  out.f = ref.as_nonlinearity();
  out.tol = sol.tol;
  out.termination = sol.termination;
  out.r = sol.r;
  out.u.reserve(sol.r.size());
  out.du.reserve(sol.r.size());
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    double w;
    if (use_lnF) {
      // w = -ln F(v); prefer the closed log form when the family has one
      if (auto lf = f.lnF(sol.u[i]))
        w = -*lf;
      else
        w = -std::log(f.F(sol.u[i]));
    } else {
      w = ref.F_inv(f.F(sol.u[i]));
    }
    const double dw = ref.f(w) * sol.du[i] / f.f(sol.u[i]);
    out.u.push_back(w);
    out.du.push_back(dw);
  }
  if (sol.has_center) {
    out.has_center = true;
    out.center_value = use_lnF && f.lnF(sol.center_value)
                           ? -*f.lnF(sol.center_value)
                           : ref.F_inv(f.F(sol.center_value));
  }
  if (sol.first_zero) out.first_zero.reset();  // level moves under the map
  return out;
}

RadialSolution cole_hopf_inverse(const Nonlinearity& f, double q,
                                 const RadialSolution& sol) {
  if (sol.equation != EquationKind::Original)
    throw PreconditionError(
        "cole_hopf_inverse expects a reference-equation trajectory");
  const ReferenceNonlinearity ref = make_reference(q);

  RadialSolution out;
  out.equation = EquationKind::Limit;
  out.N = sol.N;
  out.q = q;
  out.f = f;
  out.tol = sol.tol;
  out.termination = sol.termination;
  out.r = sol.r;
  out.u.reserve(sol.r.size());
  out.du.reserve(sol.r.size());
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double v = f.F_inv(ref.F(sol.u[i]));
    const double dv = f.f(v) * sol.du[i] / ref.f(sol.u[i]);
    out.u.push_back(v);
    out.du.push_back(dv);
  }
  if (sol.has_center) {
    out.has_center = true;
    out.center_value = f.F_inv(ref.F(sol.center_value));
  }
  out.cterm = make_gradient_coeff_spline(
      f, q, out.has_center ? out.center_value : out.u.front());
  return out;
}

ColeHopfReport verify_cole_hopf(const Nonlinearity& f, int N, double q,
                                double sigma, const ShootOpts& opts_in) {
  const double q_S = (N + 2) / 4.0;
  if (q > q_S + kQTol)
    throw RegimeError("verify_cole_hopf requires q <= q_S");
  ShootOpts opts = opts_in;
  opts.stop_at_first_zero = true;
  RadialSolution v = shoot_limit(f, N, q, sigma, opts);
  ColeHopfReport rep;
  rep.w = cole_hopf_forward(f, q, v);
  rep.max_residual = residual_norm(rep.w.f, rep.w);
  const ReferenceNonlinearity ref = make_reference(q);
  rep.tau = rep.w.center_value;
  rep.tau_gap = std::abs(ref.F(rep.tau) - f.F(sigma)) / f.F(sigma);
  return rep;
}

}  // namespace suprad
