#include "suprad/morse.hpp"

#include <cmath>

#include "suprad/bifurcation.hpp"
#include "suprad/errors.hpp"
#include "suprad/rk.hpp"

namespace suprad {

const char* morse_verdict_name(MorseVerdict v) {
  switch (v) {
    case MorseVerdict::InfiniteIndexConsistent:
      return "InfiniteIndexConsistent";
    case MorseVerdict::FiniteIndexConsistent:
      return "FiniteIndexConsistent";
    case MorseVerdict::BorderlineInconclusive:
      return "BorderlineInconclusive";
  }
  return "?";
}

namespace {

// r^2 f'(u*(r)) evaluated through the theta map below the handoff radius
// (avoids the F'(u*) cancellation) and directly above it.
double coeff_r2fp(const Nonlinearity& f, const SingularSolution& s,
                  double t) {
  const double r = std::exp(t);
  if (r < s.r_inner_end) {
    double x, y;
    s.theta_state(t, x, y);
    const double u = f.F_inv(std::exp(2.0 * t) / s.k * (1.0 + x));
    const double phi = f.phi_exact() ? s.q : f.phi(u);
    return s.k * phi / (1.0 + x);
  }
  const double u = s.outer.eval(r).u;
  return r * r * f.df(u);
}

}  // namespace

int linearized_zero_count(const Nonlinearity& f, const SingularSolution& sing,
                          double eps, double tol) {
  if (!sing.r0_star)
    throw PreconditionError("linearized_zero_count needs a first zero r0*");
  const double r0 = *sing.r0_star;
  if (!(eps > 0.0 && eps < 0.5 * r0))
    throw PreconditionError("linearized_zero_count requires eps < r0*/2");
  if (!(eps >= sing.inner_radius()))
    throw PreconditionError("eps below the certified inner radius");

  // Backward sweep in t = log r via tau = log(r0*) - t:
  //   psi_tata - (N-2) psi_ta + r^2 f'(u*) psi = 0 ... with the sign flip
  // handled by integrating in tau.
  const int N = sing.N;
  const double t1 = std::log(r0);
  const double t0 = std::log(eps);
  auto rhs = [&](double tau, const Vec2& y) -> Vec2 {
    const double t = t1 - tau;
    const double cc = coeff_r2fp(f, sing, t);
    Vec2 d;
    d.a = y.b;
    d.b = (N - 2.0) * y.b - cc * y.a;
    return d;
  };
  RkOpts ro;
  ro.tol = tol;
  ro.cap_factor = 30.0;
  ro.cap_scale_with_x = false;
  ro.x_unit = 1.0;
  ro.scale_a = r0;
  ro.scale_b = r0;

  int count = 0;
  double prev = 0.0;
  bool have_sign = false;
  auto on_step = [&](double, const Vec2&, const Vec2&, double,
                     const Vec2& y1, const Vec2&) -> bool {
    if (have_sign && y1.a != 0.0 && (y1.a > 0) != (prev > 0)) ++count;
    if (y1.a != 0.0) {
      prev = y1.a;
      have_sign = true;
    }
    return true;
  };
  // psi(r0*) = 0, psi'(r0*) = -1 -> dpsi/dtau = r0*
  const RkStatus st = integrate_dopri5(rhs, 0.0, Vec2{0.0, r0}, t1 - t0, ro,
                                       on_step);
  if (st.reason != StopReason::ReachedEnd)
    throw NumericError("linearized_zero_count: integration failed near r=" +
                       std::to_string(std::exp(t1 - st.x_end)));
  return count;
}

MorseReport morse_regime_check(const Nonlinearity& f, int N,
                               const SingularOpts& opts) {
  const ExponentReport rep = classify(f, N);
  if (!(rep.q < rep.q_S - 1e-9))
    throw RegimeError("morse_regime_check requires q < q_S");

  // The zero count needs r0*, which needs f > 0 on the whole real line.
  Nonlinearity work = f;
  if (!f.extended() && f.domain_class() == DomainClass::F11)
    throw PreconditionError("morse_regime_check needs an (f1') family or an "
                            "extended nonlinearity");
  if (!f.extended() && std::isfinite(f.domain_min()))
    work = extend_nonlinearity(f);

  SingularOpts sop = opts;
  sop.r_max = std::max(sop.r_max, 1e4);
  sop.t_start_cap = std::log(1e-5 / 4.0);  // room for the eps ladder
  const SingularSolution sing = construct_singular(work, N, rep.q, sop);
  if (!sing.r0_star)
    throw NumericError("morse_regime_check: no first zero of u*");

  MorseReport out;
  out.q = rep.q;
  out.regime = rep.regime;
  out.hardy = (N - 2.0) * (N - 2.0) / 4.0;

  // c* from the asymptotic end of the theta grid: nodes walking toward
  // t_start so the sequence approaches the limit, then Aitken.
  {
    std::vector<double> cs;
    for (int j = 4; j >= 0; --j) {
      const double t = sing.t_start + j * 0.5;
      cs.push_back(coeff_r2fp(work, sing, t));
    }
    double best = cs.back();
    for (std::size_t i = 0; i + 2 < cs.size(); ++i) {
      const double d1 = cs[i + 1] - cs[i];
      const double d2 = cs[i + 2] - cs[i + 1];
      const double den = d2 - d1;
      if (std::abs(den) > 1e-300) best = cs[i + 2] - d2 * d2 / den;
    }
    out.c_star = best;
  }

  for (const double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    if (eps >= 0.5 * (*sing.r0_star) || eps < sing.inner_radius() * 1.5)
      continue;
    out.zero_counts.emplace_back(eps,
                                 linearized_zero_count(work, sing, eps));
  }

  const double tol_v = 1e-3 * std::max(1.0, out.hardy);
  if (out.c_star > out.hardy + tol_v)
    out.verdict = MorseVerdict::InfiniteIndexConsistent;
  else if (out.c_star < out.hardy - tol_v)
    out.verdict = MorseVerdict::FiniteIndexConsistent;
  else
    out.verdict = MorseVerdict::BorderlineInconclusive;
  return out;
}

}  // namespace suprad
