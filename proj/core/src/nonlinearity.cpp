#include "suprad/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

#include "suprad/errors.hpp"
#include "suprad/nonlinearity_impl.hpp"
#include "suprad/quadrature.hpp"

namespace suprad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// expm1(x)/x with the x -> 0 limit.
inline double cexp(double x) {
  if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
  return std::expm1(x) / x;
}

// Integral of exp(-h(z)) over z >= 0 where h is convex increasing with
// h'(0) = 1, so h(z) >= z and the tail beyond h = 45 is < 1e-19.  This
// equals F(u) f'(u) for h(z) = ln f(u + z/(ln f)'(u)) - ln f(u).  The
// support can be far narrower than [0, 45] (h steep), so the quadrature is
// anchored to the bisected solution of h(z) = 45.
double phi_integral(const std::function<double(double)>& h) {
  auto integrand = [&](double z) {
    if (z <= 0.0) return 1.0;
    const double hv = h(z);
    return hv > 700.0 ? 0.0 : std::exp(-hv);
  };
  double lo = 0.0, hi = 45.0;
  if (h(hi) > 45.0) {
    for (int i = 0; i < 200 && hi - lo > 1e-8 * hi; ++i) {
      const double m = 0.5 * (lo + hi);
      (h(m) > 45.0 ? hi : lo) = m;
    }
  }
  const double zstar = hi;
  double total = 0.0;
  const double cuts[5] = {0.0, 0.25 * zstar, 0.5 * zstar, zstar,
                          std::min(45.0, 4.0 * zstar)};
  for (int i = 0; i + 1 < 5; ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    total += integrate(integrand, cuts[i], cuts[i + 1], 1e-14, 5e-13);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Families

class PowerImpl final : public NonlinImpl {
 public:
  PowerImpl(double p, double a) : p_(p), a_(a) {}

  double f(double u) const override {
    const double v = u + a_;
    return v > 0 ? std::pow(v, p_) : 0.0;
  }
  double df(double u) const override {
    const double v = u + a_;
    return v > 0 ? p_ * std::pow(v, p_ - 1) : 0.0;
  }
  double d2f(double u) const override {
    const double v = u + a_;
    return v > 0 ? p_ * (p_ - 1) * std::pow(v, p_ - 2) : 0.0;
  }
  std::optional<double> F_closed(double u) const override {
    return std::pow(u + a_, 1.0 - p_) / (p_ - 1.0);
  }
  std::optional<double> F_inv_closed(double w) const override {
    return std::pow((p_ - 1.0) * w, -1.0 / (p_ - 1.0)) - a_;
  }
  std::optional<double> lnF_closed(double u) const override {
    return (1.0 - p_) * std::log(u + a_) - std::log(p_ - 1.0);
  }
  std::optional<double> F_inv_ln_closed(double lw) const override {
    return std::exp(-(lw + std::log(p_ - 1.0)) / (p_ - 1.0)) - a_;
  }
  std::optional<double> phi_special(double) const override {
    return p_ / (p_ - 1.0);
  }
  bool phi_exact() const override { return true; }
  double curvature_ratio(double) const override { return p_ / (p_ - 1.0); }
  std::optional<double> q_analytic() const override {
    return p_ / (p_ - 1.0);
  }
  Kind kind() const override { return Kind::Power; }
  DomainClass domain_class() const override {
    return a_ == 0.0 ? DomainClass::F11 : DomainClass::F12;
  }
  double domain_min() const override { return -a_; }

 private:
  double p_, a_;
};

class ExpImpl final : public NonlinImpl {
 public:
  double f(double u) const override { return std::exp(u); }
  double df(double u) const override { return std::exp(u); }
  double d2f(double u) const override { return std::exp(u); }
  std::optional<double> F_closed(double u) const override {
    return std::exp(-u);
  }
  std::optional<double> F_inv_closed(double w) const override {
    return -std::log(w);
  }
  std::optional<double> lnF_closed(double u) const override { return -u; }
  std::optional<double> F_inv_ln_closed(double lw) const override {
    return -lw;
  }
  std::optional<double> phi_special(double) const override { return 1.0; }
  bool phi_exact() const override { return true; }
  double curvature_ratio(double) const override { return 1.0; }
  std::optional<double> q_analytic() const override { return 1.0; }
  Kind kind() const override { return Kind::Exponential; }
  DomainClass domain_class() const override { return DomainClass::F12; }
};

// f(u) = exp(u^p) on u >= 0, continued evenly (exp(|u|^p)) below zero so
// integrator stages can probe past a sign change.
class ExpPowerImpl final : public NonlinImpl {
 public:
  explicit ExpPowerImpl(double p) : p_(p) {}

  double f(double u) const override {
    return std::exp(std::pow(std::abs(u), p_));
  }
  double df(double u) const override {
    const double m = std::abs(u);
    const double d = p_ * std::pow(m, p_ - 1) * f(u);
    return u >= 0 ? d : -d;
  }
  double d2f(double u) const override {
    const double m = std::abs(u);
    return (p_ * (p_ - 1) * std::pow(m, p_ - 2) +
            p_ * p_ * std::pow(m, 2 * p_ - 2)) *
           f(u);
  }
  std::optional<double> phi_special(double u) const override {
    if (u < 0.25) return std::nullopt;  // plain product is safe there
    const double upp = std::pow(u, p_);
    return phi_integral([&](double z) {
      return upp * std::expm1(p_ * std::log1p(z / (p_ * upp)));
    });
  }
  double curvature_ratio(double u) const override {
    // 1/(1 + (p-1)/(p u^p))
    const double upp = std::pow(std::abs(u), p_);
    return 1.0 / (1.0 + (p_ - 1.0) / (p_ * upp));
  }
  std::optional<double> q_analytic() const override { return 1.0; }
  Kind kind() const override { return Kind::ExpPower; }
  DomainClass domain_class() const override { return DomainClass::F12; }

 private:
  double p_;
};

class IterExpImpl final : public NonlinImpl {
 public:
  explicit IterExpImpl(int n) : n_(n) {}

  // e_j(u): j-fold exponential, saturating to +inf.
  static double iter(double u, int j) {
    double v = u;
    for (int i = 0; i < j; ++i) v = std::exp(v);
    return v;
  }

  double f(double u) const override { return iter(u, n_); }
  double df(double u) const override {
    // ln f' = e_{n-1}(u) + sum_{j=0}^{n-2} e_j(u)
    double s = iter(u, n_ - 1);
    for (int j = 0; j <= n_ - 2; ++j) s += iter(u, j);
    return std::exp(s);
  }
  double d2f(double u) const override {
    double s0 = 0.0;
    for (int j = 0; j <= n_ - 2; ++j) s0 += iter(u, j);
    const double g2 = curvature_g2(u);
    return std::exp(iter(u, n_ - 1) + 2.0 * s0) * (1.0 + g2);
  }
  std::optional<double> phi_special(double u) const override {
    // suffix sums S_k = sum_{j=k}^{n-2} e_j(u)
    std::vector<double> S(static_cast<std::size_t>(n_), 0.0);
    for (int k = n_ - 2; k >= 0; --k)
      S[static_cast<std::size_t>(k)] =
          S[static_cast<std::size_t>(k) + 1] + iter(u, k);
    auto h = [&](double z) {
      const double lnz = std::log(z);
      double lnc_acc = 0.0;
      for (int k = 0; k <= n_ - 2; ++k) {
        const double lnD = lnz + lnc_acc - S[static_cast<std::size_t>(k)];
        if (lnD < -36.0) continue;  // c_k = 1 to machine precision
        const double D = std::exp(lnD);
        if (D > 700.0) return kInf;
        lnc_acc += std::log(cexp(D));
      }
      return z * std::exp(lnc_acc);
    };
    return phi_integral(h);
  }
  double curvature_ratio(double u) const override {
    return 1.0 / (1.0 + curvature_g2(u));
  }
  std::optional<double> q_analytic() const override { return 1.0; }
  Kind kind() const override { return Kind::IteratedExp; }
  DomainClass domain_class() const override { return DomainClass::F12; }

 private:
  // g''/g'^2 = sum_j exp(-S_j), g = ln f
  double curvature_g2(double u) const {
    double g2 = 0.0;
    for (int j = 0; j <= n_ - 2; ++j) {
      double S = 0.0;
      for (int i = j; i <= n_ - 2; ++i) S += iter(u, i);
      g2 += std::exp(-S);
    }
    return g2;
  }
  int n_;
};

class PowerLogImpl final : public NonlinImpl {
 public:
  PowerLogImpl(double p, double gamma, double a)
      : p_(p), gamma_(gamma), a_(a) {}

  // Alternating asymptotic series from repeated integration by parts:
  //   F = (u+a)^{1-p} L^{-gamma}/(p-1) * S,
  //   S = sum_j (-1)^j prod_{i<j}(gamma+i) / ((p-1) L)^j ,  L = ln(u+a).
  // Terms decay like j/((p-1)L); truncation error is below the last kept
  // term, so for L >= 40 this is exact to double precision.
  double series_S(double L) const {
    double S = 0.0, term = 1.0;
    for (int j = 0; j < 200; ++j) {
      S += term;
      const double next = -term * (gamma_ + j) / ((p_ - 1.0) * L);
      if (std::abs(next) >= std::abs(term)) break;  // optimal truncation
      term = next;
      if (std::abs(term) < 1e-18 * std::abs(S)) break;
    }
    return S;
  }

  double f(double u) const override {
    const double v = u + a_;
    if (v <= 1.0) return 0.0;
    return std::pow(v, p_) * std::pow(std::log(v), gamma_);
  }
  double df(double u) const override {
    const double v = u + a_;
    if (v <= 1.0) return 0.0;
    const double L = std::log(v);
    return std::pow(v, p_ - 1) * std::pow(L, gamma_ - 1) * (p_ * L + gamma_);
  }
  double d2f(double u) const override {
    const double v = u + a_;
    if (v <= 1.0) return 0.0;
    const double L = std::log(v);
    return std::pow(v, p_ - 2) * std::pow(L, gamma_ - 2) *
           (p_ * (p_ - 1) * L * L + gamma_ * (2 * p_ - 1) * L +
            gamma_ * (gamma_ - 1));
  }
  std::optional<double> F_closed(double u) const override {
    const double v = u + a_;
    if (v <= 1.0) return std::nullopt;
    const double L = std::log(v);
    if (L < 40.0) return std::nullopt;  // quadrature handles this range
    return std::exp((1.0 - p_) * L) * std::pow(L, -gamma_) * series_S(L) /
           (p_ - 1.0);
  }
  std::optional<double> phi_special(double u) const override {
    // F f' with the (u+a)-powers cancelled; overflow-free at any u
    const double v = u + a_;
    if (v <= 1.0) return std::nullopt;
    const double L = std::log(v);
    if (L < 30.0) return std::nullopt;
    return (p_ + gamma_ / L) / (p_ - 1.0) * series_S(L);
  }
  std::optional<double> q_analytic() const override {
    return p_ / (p_ - 1.0);
  }
  Kind kind() const override { return Kind::PowerLog; }
  DomainClass domain_class() const override { return DomainClass::F12; }
  double domain_min() const override { return 1.0 - a_; }
  double u_c2_floor() const override { return 0.0; }

 private:
  double p_, gamma_, a_;
};

class TetrationImpl final : public NonlinImpl {
 public:
  TetrationImpl(int n, double a) : n_(n), a_(a) {}

  struct Chain {
    double L = 0.0;                 // ln(u+a)
    std::vector<double> g, gp, gpp; // ln f_k and derivatives, k = 1..n
    std::vector<double> fv;         // f_k, saturating
  };

  Chain chain(double u) const {
    Chain c;
    const double v = u + a_;
    c.L = std::log(v);
    const std::size_t n = static_cast<std::size_t>(n_);
    c.g.assign(n + 1, 0.0);
    c.gp.assign(n + 1, 0.0);
    c.gpp.assign(n + 1, 0.0);
    c.fv.assign(n + 1, 0.0);
    c.g[1] = c.L;
    c.gp[1] = 1.0 / v;
    c.gpp[1] = -1.0 / (v * v);
    c.fv[1] = v;
    for (std::size_t k = 2; k <= n; ++k) {
      const double fk1 = c.fv[k - 1];
      const double gpk1 = c.gp[k - 1];
      const double gppk1 = c.gpp[k - 1];
      c.g[k] = fk1 * c.L;
      c.gp[k] = fk1 * (gpk1 * c.L + 1.0 / v);
      c.gpp[k] = fk1 * (gpk1 * (gpk1 * c.L + 1.0 / v) + gppk1 * c.L +
                        gpk1 / v - 1.0 / (v * v));
      c.fv[k] = std::exp(c.g[k]);
    }
    return c;
  }

  double f(double u) const override {
    if (u + a_ <= 0.0) return 0.0;
    return chain(u).fv[static_cast<std::size_t>(n_)];
  }
  double df(double u) const override {
    if (u + a_ <= 0.0) return 0.0;
    const Chain c = chain(u);
    const std::size_t n = static_cast<std::size_t>(n_);
    return c.fv[n] * c.gp[n];
  }
  double d2f(double u) const override {
    if (u + a_ <= 0.0) return 0.0;
    const Chain c = chain(u);
    const std::size_t n = static_cast<std::size_t>(n_);
    return c.fv[n] * (c.gpp[n] + c.gp[n] * c.gp[n]);
  }
  std::optional<double> phi_special(double u) const override {
    if (u < 0.0) return std::nullopt;
    const Chain c = chain(u);
    const std::size_t n = static_cast<std::size_t>(n_);
    const double v = u + a_;
    // ln g_n' = g_{n-1} + ln(g'_{n-1} L + 1/v); saturates when the chain
    // overflows, in which case the correction to h(z) = z is below eps.
    double ln_gpn;
    if (n == 1) {
      ln_gpn = -std::log(v);
    } else {
      ln_gpn = c.g[n - 1] + std::log(c.gp[n - 1] * c.L + 1.0 / v);
    }
    auto h = [&](double z) {
      const double lnz = std::log(z);
      const double ldelta = lnz - ln_gpn;
      const double delta = ldelta < -745.0 ? 0.0 : std::exp(ldelta);
      // lp = log1p(delta/v)/delta with the delta -> 0 limit
      const double x = delta / v;
      const double lp =
          x < 1e-8 ? (1.0 - 0.5 * x) / v : std::log1p(x) / delta;
      double eta = lp * v;  // eta_1
      for (std::size_t k = 2; k <= n; ++k) {
        const double gpk1 = c.gp[k - 1];
        if (!std::isfinite(gpk1)) return z;  // saturated: h = z to machine
        const double D = gpk1 * eta * delta;
        if (D > 700.0) return kInf;
        eta = (std::exp(D) * lp + c.L * gpk1 * eta * cexp(D)) /
              (gpk1 * c.L + 1.0 / v);
      }
      return z * eta;
    };
    return phi_integral(h);
  }
  double curvature_ratio(double u) const override {
    const Chain c = chain(u);
    const std::size_t n = static_cast<std::size_t>(n_);
    double g2 = c.gpp[n] / (c.gp[n] * c.gp[n]);
    if (!std::isfinite(g2)) {
      // saturated chain: g''/g'^2 ~ 1/f_{n-1} -> 0
      g2 = 0.0;
    }
    return 1.0 / (1.0 + g2);
  }
  std::optional<double> q_analytic() const override { return 1.0; }
  Kind kind() const override { return Kind::Tetration; }
  DomainClass domain_class() const override { return DomainClass::F12; }
  double domain_min() const override { return -a_; }

 private:
  int n_;
  double a_;
};

}  // namespace

double NonlinImpl::curvature_ratio(double u) const {
  const double fp = df(u);
  const double num = fp * fp;
  const double den = f(u) * d2f(u);
  if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0)
    throw NumericError("curvature ratio overflow at u=" + std::to_string(u));
  return num / den;
}

// ---------------------------------------------------------------------------
// Nonlinearity facade

Nonlinearity::Nonlinearity(std::shared_ptr<const NonlinImpl> impl)
    : impl_(std::move(impl)) {}

double Nonlinearity::f(double u) const { return impl_->f(u); }
double Nonlinearity::df(double u) const { return impl_->df(u); }
double Nonlinearity::d2f(double u) const { return impl_->d2f(u); }

double Nonlinearity::F(double u) const {
  if (u <= domain_min())
    throw PreconditionError("F: u=" + std::to_string(u) +
                            " at or below the domain end " +
                            std::to_string(domain_min()));
  if (auto v = impl_->F_closed(u)) return *v;
  return numeric_F(*this, u);
}

std::optional<double> Nonlinearity::lnF(double u) const {
  return impl_->lnF_closed(u);
}

std::optional<double> Nonlinearity::F_inv_ln(double lw) const {
  return impl_->F_inv_ln_closed(lw);
}

bool Nonlinearity::has_closed_F() const {
  return impl_->F_closed(std::max(domain_min() + 1.0, 1.0)).has_value();
}

double Nonlinearity::phi(double u) const {
  if (auto v = impl_->phi_special(u)) return *v;
  return F(u) * df(u);
}

bool Nonlinearity::phi_exact() const { return impl_->phi_exact(); }

double Nonlinearity::curvature_ratio(double u) const {
  return impl_->curvature_ratio(u);
}

std::optional<double> Nonlinearity::q_analytic() const {
  return impl_->q_analytic();
}

Kind Nonlinearity::kind() const { return impl_->kind(); }
DomainClass Nonlinearity::domain_class() const {
  return impl_->domain_class();
}
double Nonlinearity::domain_min() const { return impl_->domain_min(); }
double Nonlinearity::u_c2_floor() const { return impl_->u_c2_floor(); }
bool Nonlinearity::extended() const { return impl_->is_extended(); }
const std::string& Nonlinearity::spec() const { return impl_->spec_string; }

double Nonlinearity::F_inv(double w) const {
  if (!(w > 0.0))
    throw PreconditionError("F_inv: w must be positive, got " +
                            std::to_string(w));
  if (auto v = impl_->F_inv_closed(w)) return *v;

  const double dmin = domain_min();
  const bool bounded = std::isfinite(dmin);
  auto Feval = [&](double u) { return F(u); };

  // Geometric bracketing from a seed: walk up while F > w, down while F < w.
  double ulo = bounded ? dmin + 1.0 : 0.0;  // lower u -> larger F
  double uhi = ulo;
  double Flo = Feval(ulo);
  if (Flo >= w) {
    // walk up until F < w; keep the last point still above w as ulo.
    // Additive doubling near theseed, squaring growth beyond u = 4 so
    // polynomially-decaying F stays reachable across the double range.
    double step = 1.0;
    bool found = false;
    for (int i = 0; i < 200; ++i) {
      uhi = ulo < 4.0 ? ulo + step : ulo * ulo;
      if (!std::isfinite(uhi) || uhi > 1e300) break;
      const double Fh = Feval(uhi);
      if (Fh < w) {
        found = true;
        break;
      }
      ulo = uhi;
      step *= 2.0;
    }
    if (!found)
      throw NumericError("F_inv: no bracket above seed after 200 doublings");
  } else {
    // walk down until F >= w
    bool found = false;
    if (bounded) {
      double gap = ulo - dmin;
      for (int i = 0; i < 200; ++i) {
        gap *= 0.5;
        const double u = dmin + gap;
        const double Fv = Feval(u);
        if (Fv >= w) {
          uhi = ulo;
          ulo = u;
          found = true;
          break;
        }
        ulo = u;
      }
    } else {
      double step = 1.0;
      for (int i = 0; i < 200; ++i) {
        const double u = ulo - step;
        const double Fv = Feval(u);
        if (Fv >= w) {
          uhi = ulo;
          ulo = u;
          found = true;
          break;
        }
        ulo = u;
        step *= 2.0;
      }
    }
    if (!found)
      throw NumericError(
          "F_inv: w outside the range of F after 200 doublings (w=" +
          std::to_string(w) + ")");
  }

  // Safeguarded Newton on ln F(u) - ln w; F' = -1/f gives the scale-free
  // step u <- u + f F ln(F/w).
  double a = ulo, b = uhi;
  double x = 0.5 * (a + b);
  const double lnw = std::log(w);
  for (int i = 0; i < 200; ++i) {
    const double Fx = Feval(x);
    const double gx = Fx > 0.0 ? std::log(Fx) - lnw : -1e308;
    if (std::abs(gx) <= 1e-13) return x;
    if (gx > 0)
      a = x;  // F too large -> root above
    else
      b = x;
    double xn = x;
    if (Fx > 0.0) {
      const double step = f(x) * Fx * gx;
      xn = x + step;
    }
    if (!(xn > a && xn < b)) {
      // geometric midpoint localizes wide positive brackets quickly
      xn = (a > 0.0 && b > 4.0 * a)
               ? std::exp(0.5 * (std::log(a) + std::log(b)))
               : 0.5 * (a + b);
    }
    if (b - a <= 1e-15 * (std::abs(x) + 1.0)) return xn;
    x = xn;
  }
  throw NumericError("F_inv: Newton failed to converge for w=" +
                     std::to_string(w));
}

// ---------------------------------------------------------------------------
// Numeric F: adaptive quadrature to T plus tail qhat/f'(T), T doubled until
// the tail correction is stationary.

namespace {

// Integrate 1/f over [a,b] with geometric subdivision so the adaptive rule
// cannot miss a narrow bump far from the panel nodes.
double quad_inv_f(const Nonlinearity& nl, double a, double b) {
  std::vector<double> cuts;
  cuts.push_back(a);
  // geometric ladder |t| = 2^k between a and b
  for (double m = 1.0; m < std::max(std::abs(a), std::abs(b)); m *= 2.0) {
    if (-m > a && -m < b) cuts.push_back(-m);
    if (m > a && m < b) cuts.push_back(m);
  }
  if (a < 0.0 && b > 0.0) cuts.push_back(0.0);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  auto integrand = [&](double t) {
    const double ft = nl.f(t);
    if (!(ft > 0.0)) return 0.0;
    const double inv = 1.0 / ft;
    return std::isfinite(inv) ? inv : 0.0;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadResult r =
        integrate_adaptive(integrand, cuts[i], cuts[i + 1], 1e-280, 3e-15);
    if (!r.converged)
      throw NumericError("F quadrature stalled on [" +
                         std::to_string(cuts[i]) + "," +
                         std::to_string(cuts[i + 1]) + "], residual " +
                         std::to_string(r.error));
    total += r.value;
  }
  return total;
}

}  // namespace

double numeric_F(const Nonlinearity& nl, double u) {
  auto tail = [&](double T) {
    const double qhat =
        nl.q_analytic() ? *nl.q_analytic() : nl.curvature_ratio(T);
    const double d = nl.df(T);
    if (!std::isfinite(d) || d <= 0.0) return 0.0;
    const double t = qhat / d;
    return std::isfinite(t) ? t : 0.0;
  };
  double T = std::max(2.0 * std::abs(u) + 2.0, u + 2.0);
  double total = quad_inv_f(nl, u, T);
  double Fv = total + tail(T);
  for (int i = 0; i < 200; ++i) {
    const double T2 = 2.0 * T;
    total += quad_inv_f(nl, T, T2);
    const double F2 = total + tail(T2);
    const double dF = std::abs(F2 - Fv);
    T = T2;
    Fv = F2;
    if (dF <= 1e-12 * std::max(Fv, 1e-300)) return Fv;
  }
  throw NumericError("numeric_F: tail not stationary by T=" +
                     std::to_string(T) + " for u=" + std::to_string(u));
}

// ---------------------------------------------------------------------------
// Grammar: name[:key=value(,key=value)*]

namespace {

double parse_num(const std::string& s, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("bad numeric literal '" + s + "' in " + ctx);
  }
}

int parse_int(const std::string& s, const std::string& ctx) {
  const double v = parse_num(s, ctx);
  const double r = std::floor(v);
  if (r != v || std::abs(v) > 1e9)
    throw ParseError("expected an integer for " + ctx + ", got '" + s + "'");
  return static_cast<int>(r);
}

}  // namespace

Nonlinearity make_builtin(std::string_view spec_in) {
  const std::string spec(spec_in);
  std::string name = spec;
  std::vector<std::pair<std::string, std::string>> kv;
  if (const auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (rest.empty()) throw ParseError("empty parameter list in '" + spec + "'");
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
        throw ParseError("expected key=value, got '" + item + "'");
      kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
  }

  auto take = [&](const char* key) -> std::optional<std::string> {
    for (auto it = kv.begin(); it != kv.end(); ++it) {
      if (it->first == key) {
        std::string v = it->second;
        kv.erase(it);
        return v;
      }
    }
    return std::nullopt;
  };
  auto done = [&]() {
    if (!kv.empty())
      throw ParseError("unknown key '" + kv.front().first + "' for '" + name +
                       "'");
  };

  std::shared_ptr<NonlinImpl> impl;
  if (name == "power") {
    auto ps = take("p");
    if (!ps) throw ParseError("power requires p");
    const double p = parse_num(*ps, "power:p");
    double a = 0.0;
    if (auto as = take("a")) a = parse_num(*as, "power:a");
    done();
    if (!(p > 1.0)) throw ConstraintError("power requires p > 1");
    if (!(a >= 0.0)) throw ConstraintError("power requires a >= 0");
    impl = std::make_shared<PowerImpl>(p, a);
  } else if (name == "exp") {
    done();
    impl = std::make_shared<ExpImpl>();
  } else if (name == "exppow") {
    auto ps = take("p");
    if (!ps) throw ParseError("exppow requires p");
    const double p = parse_num(*ps, "exppow:p");
    done();
    if (!(p >= 1.0)) throw ConstraintError("exppow requires p >= 1");
    impl = std::make_shared<ExpPowerImpl>(p);
  } else if (name == "iterexp") {
    auto ns = take("n");
    if (!ns) throw ParseError("iterexp requires n");
    const int n = parse_int(*ns, "iterexp:n");
    done();
    if (n < 2) throw ConstraintError("iterexp requires n >= 2");
    impl = std::make_shared<IterExpImpl>(n);
  } else if (name == "powlog") {
    auto ps = take("p");
    auto gs = take("gamma");
    auto as = take("a");
    if (!ps || !gs || !as) throw ParseError("powlog requires p, gamma, a");
    const double p = parse_num(*ps, "powlog:p");
    const double g = parse_num(*gs, "powlog:gamma");
    const double a = parse_num(*as, "powlog:a");
    done();
    if (!(p > 1.0)) throw ConstraintError("powlog requires p > 1");
    if (!(g >= 0.0)) throw ConstraintError("powlog requires gamma >= 0");
    if (!(a > 1.0)) throw ConstraintError("powlog requires a > 1");
    impl = std::make_shared<PowerLogImpl>(p, g, a);
  } else if (name == "tetration") {
    auto ns = take("n");
    auto as = take("a");
    if (!ns || !as) throw ParseError("tetration requires n, a");
    const int n = parse_int(*ns, "tetration:n");
    const double a = parse_num(*as, "tetration:a");
    done();
    if (n < 2) throw ConstraintError("tetration requires n >= 2");
    if (!(a > 1.0)) throw ConstraintError("tetration requires a > 1");
    impl = std::make_shared<TetrationImpl>(n, a);
  } else {
    throw ParseError("unknown nonlinearity '" + name + "'");
  }
  impl->spec_string = spec;
  return Nonlinearity(impl);
}

Nonlinearity make_power(double p, double a) {
  if (!(p > 1.0) || !(a >= 0.0))
    throw ConstraintError("make_power requires p > 1, a >= 0");
  auto impl = std::make_shared<PowerImpl>(p, a);
  impl->spec_string = "power:p=" + std::to_string(p) +
                      (a != 0.0 ? ",a=" + std::to_string(a) : "");
  return Nonlinearity(impl);
}

Nonlinearity make_exp() {
  auto impl = std::make_shared<ExpImpl>();
  impl->spec_string = "exp";
  return Nonlinearity(impl);
}

// ---------------------------------------------------------------------------
// q estimation

namespace {

// Aitken delta-squared, iterated until fewer than 3 entries remain.
// Returns {estimate, |last - previous| on the deepest usable row}.
std::pair<double, double> aitken_iterated(std::vector<double> x) {
  double best = x.back();
  double gap = x.size() >= 2 ? std::abs(x[x.size() - 1] - x[x.size() - 2])
                             : kInf;
  while (x.size() >= 3) {
    std::vector<double> y;
    y.reserve(x.size() - 2);
    for (std::size_t i = 0; i + 2 < x.size(); ++i) {
      const double d1 = x[i + 1] - x[i];
      const double d2 = x[i + 2] - x[i + 1];
      const double den = d2 - d1;
      if (std::abs(den) < 1e-300 * (std::abs(d1) + 1.0))
        y.push_back(x[i + 2]);
      else
        y.push_back(x[i + 2] - d2 * d2 / den);
    }
    const double g = std::abs(y.back() - best);
    best = y.back();
    gap = g;
    x = std::move(y);
  }
  return {best, gap};
}

// Neville extrapolation to 0 in the abscissae eps_i.
std::pair<double, double> neville_to_zero(const std::vector<double>& eps,
                                          const std::vector<double>& val) {
  const std::size_t n = val.size();
  std::vector<double> p(val);
  double prev_diag = p[0];
  double diag = p[0];
  for (std::size_t i = 1; i < n; ++i) {
    // build row i in place, walking m = 1..i
    std::vector<double> row(i + 1);
    row[0] = val[i];
    for (std::size_t m = 1; m <= i; ++m) {
      const double ei = eps[i];
      const double eim = eps[i - m];
      row[m] = (ei * p[m - 1] - eim * row[m - 1]) / (ei - eim);
    }
    prev_diag = diag;
    diag = row[i];
    p = std::move(row);
  }
  return {diag, std::abs(diag - prev_diag)};
}

}  // namespace

QEstimate estimate_q(const Nonlinearity& f) {
  const double u0 = std::max(f.u_c2_floor(), 1.0);
  constexpr int kMaxJ = 14;
  std::vector<double> us, xs, eps;
  QEstimate out;

  double prev = 0.0;
  bool machine_flat = false;
  for (int j = 0; j <= kMaxJ; ++j) {
    const double u = u0 * std::pow(10.0, j);
    const double x = f.phi(u);
    us.push_back(u);
    xs.push_back(x);
    eps.push_back(1.0 / std::log(u + 2.0));
    if (j >= 1 && std::abs(x - prev) <= 1e-15 * std::max(1.0, std::abs(x))) {
      if (machine_flat) break;  // two flat increments: sequence saturated
      machine_flat = true;
    } else {
      machine_flat = false;
    }
    prev = x;
    if (j >= 3) {
      auto [qa, ga] = aitken_iterated(xs);
      auto [qn, gn] = neville_to_zero(eps, xs);
      if (std::min(ga, gn) < 1e-7) break;
    }
  }

  out.nodes = static_cast<int>(xs.size());
  auto [qa, ga] = aitken_iterated(xs);
  auto [qn, gn] = neville_to_zero(eps, xs);
  if (machine_flat || xs.size() < 4) {
    out.q = xs.back();
    out.seq_gap = xs.size() >= 2 ? std::abs(xs.back() - xs[xs.size() - 2]) : 0;
  } else if (gn <= ga) {
    out.q = qn;
    out.seq_gap = gn;
  } else {
    out.q = qa;
    out.seq_gap = ga;
  }
  out.converged = machine_flat || out.seq_gap < 1e-6;
  out.cross_check = f.curvature_ratio(us.back());

  if (!out.converged) {
    std::string tail;
    for (std::size_t i = xs.size() >= 4 ? xs.size() - 4 : 0; i < xs.size();
         ++i)
      tail += " " + std::to_string(xs[i]);
    throw NumericError(
        "estimate_q: F*f' sequence not Cauchy after 14 decades (f2 likely "
        "violated); tail:" +
        tail);
  }
  if (out.q < 1.0 - 1e-6)
    throw NumericError("estimate_q: Lemma bound q >= 1 violated (q=" +
                       std::to_string(out.q) + "), model or evaluator error");
  return out;
}

// ---------------------------------------------------------------------------
// Exponents

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Critical: return "Critical";
    case Regime::Oscillatory: return "Oscillatory";
    case Regime::Stable: return "Stable";
    case Regime::BorderlineJL: return "BorderlineJL";
    case Regime::OutOfScope: return "OutOfScope";
  }
  return "?";
}

ExponentReport classify(const Nonlinearity& f, int N) {
  if (N < 3) throw PreconditionError("classify requires N >= 3");
  ExponentReport r;
  r.N = N;
  const auto qa = f.q_analytic();
  r.q = qa ? *qa : estimate_q(f).q;
  r.q_S = (N + 2) / 4.0;
  r.q_JL = (N - 2.0 * std::sqrt(N - 1.0)) / 4.0;
  r.k = 2.0 * N - 4.0 * r.q;
  constexpr double tol = 1e-9;
  r.p = std::abs(r.q - 1.0) <= tol ? kInf : r.q / (r.q - 1.0);
  r.p_S = N == 2 ? kInf : (N + 2.0) / (N - 2.0);
  r.p_JL = N >= 11 ? 1.0 + 4.0 / (N - 4.0 - 2.0 * std::sqrt(N - 1.0)) : kInf;
  r.at_jl_boundary = std::abs(r.q - r.q_JL) <= tol;

  if (std::abs(r.q - r.q_S) <= tol) {
    r.regime = Regime::Critical;
  } else if (r.q > r.q_S) {
    r.regime = Regime::OutOfScope;
  } else if (r.at_jl_boundary) {
    // With an analytic q the side of the threshold is decidable; the
    // inclusive q <= q_JL case behaves as Stable.  A purely numeric q within
    // tol of q_JL stays BorderlineJL.
    if (qa)
      r.regime = *qa <= r.q_JL ? Regime::Stable : Regime::Oscillatory;
    else
      r.regime = Regime::BorderlineJL;
  } else if (r.q > r.q_JL) {
    r.regime = Regime::Oscillatory;
  } else {
    r.regime = Regime::Stable;
  }
  return r;
}

SuperlinearityReport check_superlinearity(const Nonlinearity& f, int N,
                                          double u_floor, double shift_M,
                                          double p_bar_slack) {
  if (N < 3) throw PreconditionError("check_superlinearity requires N >= 3");
  if (!(u_floor > 0.0))
    throw PreconditionError("check_superlinearity requires u_floor > 0");
  SuperlinearityReport rep;
  rep.p_bar = (N + 2.0) / (N - 2.0) + p_bar_slack;

  // Clamp the top of the grid so f stays in range.
  double u_hi = u_floor * 1e4;
  while (u_hi > 2.0 * u_floor && !(f.f(u_hi + shift_M) < 1e290)) u_hi *= 0.5;

  constexpr int kSamples = 48;
  auto fM = [&](double t) { return f.f(t + shift_M); };
  double H = integrate(fM, 0.0, u_floor, 1e-300, 1e-12);
  double worst = kInf;
  double worst_u = u_floor;
  const double ratio = std::pow(u_hi / u_floor, 1.0 / (kSamples - 1));
  double u_prev = u_floor;
  for (int i = 0; i < kSamples; ++i) {
    const double u = u_floor * std::pow(ratio, i);
    if (i > 0) {
      H += integrate(fM, u_prev, u, 1e-300, 1e-12);
      u_prev = u;
    }
    const double lhs = u * fM(u);
    const double margin = 1.0 - (1.0 + rep.p_bar) * H / lhs;
    if (margin < worst) {
      worst = margin;
      worst_u = u;
    }
  }
  rep.worst_margin = worst;
  rep.u_at_worst = worst_u;
  rep.pass = worst >= 0.0;
  return rep;
}

}  // namespace suprad
