#include "suprad/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "suprad/errors.hpp"
#include "suprad/interp.hpp"
#include "suprad/nonlinearity_impl.hpp"
#include "suprad/parallel.hpp"

namespace suprad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ExtendedImpl final : public NonlinImpl {
 public:
  ExtendedImpl(Nonlinearity base, double delta,
               std::vector<CubicPiece> pieces, std::string record)
      : base_(std::move(base)),
        delta_(delta),
        pieces_(std::move(pieces)),
        record_(std::move(record)) {}

  const Nonlinearity& base() const { return base_; }
  const std::string& record() const { return record_; }

  double f(double u) const override {
    if (u >= 0.0) return base_.f(u);
    if (u <= -1.0) return 0.5 * delta_;
    return piece(u).value(u);
  }
  double df(double u) const override {
    if (u >= 0.0) return base_.df(u);
    if (u <= -1.0) return 0.0;
    return piece(u).deriv(u);
  }
  double d2f(double u) const override {
    if (u >= 0.0) return base_.d2f(u);
    if (u <= -1.0) return 0.0;
    return piece(u).deriv2(u);
  }
  std::optional<double> F_closed(double u) const override {
    if (u >= 0.0 && base_.has_closed_F()) return base_.F(u);
    return std::nullopt;
  }
  std::optional<double> F_inv_closed(double w) const override {
    if (!base_.has_closed_F()) return std::nullopt;
    const double v = base_.F_inv(w);
    if (v >= 0.0) return v;
    return std::nullopt;
  }
  std::optional<double> lnF_closed(double u) const override {
    return u >= 0.0 ? base_.lnF(u) : std::nullopt;
  }
  // Valid above zero only; the similarity composition works on the base.
  std::optional<double> phi_special(double u) const override {
    if (u < 0.0) return std::nullopt;
    return base_.phi(u);
  }
  bool phi_exact() const override { return base_.phi_exact(); }
  double curvature_ratio(double u) const override {
    return u >= 0.0 ? base_.curvature_ratio(u)
                    : NonlinImpl::curvature_ratio(u);
  }
  std::optional<double> q_analytic() const override {
    return base_.q_analytic();
  }
  Kind kind() const override { return base_.kind(); }
  DomainClass domain_class() const override { return DomainClass::F12; }
  double u_c2_floor() const override { return base_.u_c2_floor(); }
  bool is_extended() const override { return true; }

 private:
  const CubicPiece& piece(double u) const {
    for (const auto& p : pieces_)
      if (u <= p.x1) return p;
    return pieces_.back();
  }
  Nonlinearity base_;
  double delta_;
  std::vector<CubicPiece> pieces_;
  std::string record_;
};

Nonlinearity composition_base(const Nonlinearity& f) {
  if (f.extended())
    return static_cast<const ExtendedImpl&>(f.impl()).base();
  return f;
}

}  // namespace

Nonlinearity extend_nonlinearity(const Nonlinearity& f, bool alt_shape) {
  if (f.extended())
    throw PreconditionError("nonlinearity already carries an extension");
  const double f0 = f.f(0.0);
  if (!(f0 > 0.0))
    throw PreconditionError("(f1') violated: f(0) <= 0");
  // delta = sampled infimum of f on [0, u_hi]
  double u_hi = 1e6;
  while (u_hi > 1.0 && !(f.f(u_hi) < 1e290)) u_hi /= 10.0;
  double delta = f0;
  for (int i = 0; i <= 64; ++i) {
    const double u = std::pow(10.0, -6.0 + (std::log10(u_hi) + 6.0) * i / 64.0);
    const double fu = f.f(u);
    if (!(fu > 0.0))
      throw PreconditionError("(f1') violated: f <= 0 at u=" +
                              std::to_string(u));
    delta = std::min(delta, fu);
  }
  const double d = f.df(0.0);
  if (d < 0.0)
    throw PreconditionError("monotone extension needs f'(0) >= 0");

  const double drop = f0 - 0.5 * delta;
  std::vector<CubicPiece> pieces;
  std::ostringstream rec;
  rec << "C1 monotone cubic on [-1,0], delta=" << delta;
  if (!alt_shape && d <= 3.0 * drop) {
    pieces.push_back(CubicPiece{-1.0, 0.0, 0.5 * delta, 0.0, f0, d});
    rec << ", single interval";
  } else {
    double eps;
    if (!alt_shape)
      eps = std::min(0.5, drop / std::max(d, 1e-300));
    else
      eps = d > 0.0 ? std::min(0.4, drop / (2.0 * d)) : 0.4;
    const double vmid = f0 - std::max(0.5 * d * eps, alt_shape ? drop / 3.0 : 0.5 * d * eps);
    const double dl = (vmid - 0.5 * delta) / (1.0 - eps);
    const double dr = (f0 - vmid) / eps;
    const double smid = std::min(dl, dr);
    pieces.push_back(CubicPiece{-1.0, -eps, 0.5 * delta, 0.0, vmid, smid});
    pieces.push_back(CubicPiece{-eps, 0.0, vmid, smid, f0, d});
    rec << ", knot at -" << eps << (alt_shape ? " (alt)" : "");
  }
  auto impl = std::make_shared<ExtendedImpl>(f, delta, std::move(pieces),
                                             rec.str());
  impl->spec_string = f.spec() + "+ext";
  return Nonlinearity(impl);
}

std::string extension_record(const Nonlinearity& f_ext) {
  if (!f_ext.extended()) return "none";
  return static_cast<const ExtendedImpl&>(f_ext.impl()).record();
}

namespace {

struct Master {
  RadialSolution traj;      // stored grid on the composition base
  Nonlinearity base;
  double rho0 = 0.0;
  double lnF_rho0 = 0.0;
};

double level_for(const Nonlinearity& base, double rho0, double rho) {
  const auto lnF = [&](double u) {
    auto v = base.lnF(u);
    if (!v) throw NumericError("composition requires a closed log-F form");
    return *v;
  };
  const double ln_arg = lnF(rho0) - lnF(rho) + lnF(0.0);
  auto lvl = base.F_inv_ln(ln_arg);
  if (!lvl) throw NumericError("composition requires a closed F^-1 log form");
  return *lvl;
}

double mu_from_level_radius(const Nonlinearity& base, double rho0, double rho,
                            double r_level) {
  const double lnlam2 = *base.lnF(rho0) - *base.lnF(rho);
  return std::exp(2.0 * std::log(r_level) - lnlam2);
}

Master build_master(const Nonlinearity& base, int N, double rho_deepest,
                    const ShootOpts& opts) {
  Master m;
  m.base = base;
  m.rho0 = 0.9 * rho_direct_max(base);
  m.lnF_rho0 = *base.lnF(m.rho0);
  const double lvl = level_for(base, m.rho0, rho_deepest);
  ShootOpts so = opts;
  so.stop_at_first_zero = false;
  so.detect_zero = false;
  so.stop_at_level = lvl;
  so.r_max = 1e280;
  so.store_grid = true;
  m.traj = shoot_regular(base, N, m.rho0, so);
  if (m.traj.termination != Termination::ReachedLevel)
    throw NumericError("composition master failed to reach the deepest level");
  return m;
}

// radius where the (strictly decreasing) master hits the level
double master_radius_at(const Master& m, double lvl) {
  const auto& u = m.traj.u;
  const auto& r = m.traj.r;
  if (lvl > u.front() || lvl < u.back())
    throw NumericError("level outside the master range");
  // binary search on the descending u
  std::size_t lo = 0, hi = u.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (u[mid] >= lvl)
      lo = mid;
    else
      hi = mid;
  }
  const CubicPiece c{r[lo], r[hi], u[lo], m.traj.du[lo], u[hi],
                     m.traj.du[hi]};
  double a = r[lo], b = r[hi];
  double fa = u[lo] - lvl;
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = c.value(mid) - lvl;
    if ((fm > 0) == (fa > 0))
      a = mid, fa = fm;
    else
      b = mid;
    if (b - a <= 1e-14 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (a + b);
}

MuResult mu_direct(const Nonlinearity& f_ext, int N, double rho,
                   const ShootOpts& opts_in) {
  ShootOpts so = opts_in;
  so.detect_zero = true;
  so.stop_at_first_zero = true;
  RadialSolution sol = shoot_regular(f_ext, N, rho, so);
  if (!sol.first_zero)
    throw NumericError("mu_of_rho: no first zero before r_max=" +
                       std::to_string(so.r_max) + " (termination " +
                       std::to_string(static_cast<int>(sol.termination)) +
                       ")");
  MuResult res;
  res.r0 = *sol.first_zero;
  res.mu = res.r0 * res.r0;
  return res;
}

}  // namespace

MuResult mu_of_rho(const Nonlinearity& f_ext, int N, double rho,
                   const ShootOpts& opts) {
  if (!(rho > 0.0)) throw PreconditionError("mu_of_rho requires rho > 0");
  const double rd = rho_direct_max(f_ext);
  if (rho <= rd) return mu_direct(f_ext, N, rho, opts);

  const Nonlinearity base = composition_base(f_ext);
  if (!base.phi_exact() || !base.lnF(0.0))
    throw NumericError(
        "mu_of_rho: center too large for direct integration and the family "
        "has no exact similarity reduction");
  ShootOpts so = opts;
  so.store_grid = false;
  so.detect_zero = false;
  so.stop_at_first_zero = false;
  so.r_max = 1e280;
  const double rho0 = 0.9 * rho_direct_max(base);
  so.stop_at_level = level_for(base, rho0, rho);
  RadialSolution master = shoot_regular(base, N, rho0, so);
  if (master.termination != Termination::ReachedLevel)
    throw NumericError("mu_of_rho: composition master did not reach level");
  const double r_level = master.back_radius();
  MuResult res;
  res.mu = mu_from_level_radius(base, rho0, rho, r_level);
  res.r0 = std::sqrt(res.mu);
  return res;
}

double mu_star(const Nonlinearity& f_ext, int N, const SingularOpts& opts) {
  const ExponentReport rep = classify(f_ext, N);
  if (!(rep.q < rep.q_S - 1e-9))
    throw RegimeError("mu_star requires q < q_S");
  SingularSolution s = construct_singular(f_ext, N, rep.q, opts);
  if (!s.r0_star)
    throw NumericError("mu_star: singular solution has no zero before r_max");
  return (*s.r0_star) * (*s.r0_star);
}

BifurcationCurve sweep_curve(const Nonlinearity& f, int N,
                             const SweepOpts& opts) {
  if (!(opts.rho_min > 0.0 && opts.rho_max > opts.rho_min) ||
      opts.points < 2)
    throw PreconditionError("sweep_curve: bad rho grid");
  const Nonlinearity f_ext = f.extended() ? f : extend_nonlinearity(f);

  BifurcationCurve curve;
  curve.N = N;
  curve.f_spec = f.spec();
  curve.ext_record = extension_record(f_ext);

  const int n = opts.points;
  curve.samples.resize(static_cast<std::size_t>(n));
  const double lr0 = std::log(opts.rho_min);
  const double lr1 = std::log(opts.rho_max);

  ShootOpts so;
  so.tol = opts.tol;
  so.cap_factor = opts.cap_factor;
  so.r_max = 1e6;

  // One shared master for every sample beyond the direct range.
  const double rd = rho_direct_max(f_ext);
  std::optional<Master> master;
  if (opts.rho_max > rd) {
    const Nonlinearity base = composition_base(f_ext);
    if (base.phi_exact() && base.lnF(0.0))
      master = build_master(base, N, opts.rho_max, so);
  }

  auto mu_eval = [&](double rho) -> MuResult {
    if (rho <= rd) return mu_direct(f_ext, N, rho, so);
    if (!master)
      throw NumericError("center too large and no similarity reduction");
    const double lvl = level_for(master->base, master->rho0, rho);
    const double r_level = master_radius_at(*master, lvl);
    MuResult res;
    res.mu = mu_from_level_radius(master->base, master->rho0, rho, r_level);
    res.r0 = std::sqrt(res.mu);
    return res;
  };

  parallel_for(n, opts.jobs, [&](int i) {
    BifSample& s = curve.samples[static_cast<std::size_t>(i)];
    s.rho = std::exp(lr0 + (lr1 - lr0) * i / (n - 1));
    try {
      const MuResult m = mu_eval(s.rho);
      s.mu = m.mu;
      s.r0 = m.r0;
      s.ok = true;
    } catch (const Error& e) {
      s.ok = false;
      s.error = e.what();
    }
  });

  // finite-difference slopes on the (non-uniform) grid
  for (int i = 0; i < n; ++i) {
    auto& s = curve.samples[static_cast<std::size_t>(i)];
    if (!s.ok) continue;
    const int il = std::max(0, i - 1);
    const int ih = std::min(n - 1, i + 1);
    const auto& sl = curve.samples[static_cast<std::size_t>(il)];
    const auto& sh = curve.samples[static_cast<std::size_t>(ih)];
    if (sl.ok && sh.ok && sh.rho > sl.rho)
      s.dmu_drho = (sh.mu - sl.mu) / (sh.rho - sl.rho);
  }

  if (opts.compute_mu_star) {
    try {
      SingularOpts sop;
      sop.r_max = 1e6;
      curve.mu_star = mu_star(f_ext, N, sop);
    } catch (const Error&) {
      curve.mu_star.reset();
    }
  }

  // turning points: interior slope sign changes with a significant local
  // amplitude, refined by shrinking a 3-point bracket
  const double mu_scale = [&] {
    double m = 0.0;
    for (const auto& s : curve.samples)
      if (s.ok) m = std::max(m, std::abs(s.mu));
    return std::max(m, 1e-300);
  }();
  auto significant = [&](int i) {
    const int a = std::max(0, i - 1);
    const int b = std::min(n - 1, i + 2);
    double mn = kInf, mx = -kInf;
    for (int j = a; j <= b; ++j) {
      if (!curve.samples[static_cast<std::size_t>(j)].ok) return false;
      mn = std::min(mn, curve.samples[static_cast<std::size_t>(j)].mu);
      mx = std::max(mx, curve.samples[static_cast<std::size_t>(j)].mu);
    }
    return (mx - mn) > 1e-6 * mu_scale;
  };
  auto refine_turn = [&](double a, double b) {
    double best = std::sqrt(a * b);
    for (int round = 0; round < 10; ++round) {
      if (b / a < 1.0 + 1e-4) break;
      constexpr int m = 9;
      double rr[m], mm[m];
      for (int j = 0; j < m; ++j) {
        rr[j] = a * std::pow(b / a, static_cast<double>(j) / (m - 1));
        mm[j] = mu_eval(rr[j]).mu;
      }
      int ext = 1;
      for (int j = 1; j + 1 < m; ++j) {
        const bool lmax = mm[j] >= mm[j - 1] && mm[j] >= mm[j + 1];
        const bool lmin = mm[j] <= mm[j - 1] && mm[j] <= mm[j + 1];
        if (lmax || lmin) {
          ext = j;
          break;
        }
      }
      best = rr[ext];
      a = rr[std::max(0, ext - 1)];
      b = rr[std::min(m - 1, ext + 1)];
    }
    return best;
  };
  for (int i = 1; i + 1 < n; ++i) {
    const auto& s0 = curve.samples[static_cast<std::size_t>(i - 1)];
    const auto& s1 = curve.samples[static_cast<std::size_t>(i)];
    const auto& s2 = curve.samples[static_cast<std::size_t>(i + 1)];
    if (!(s0.ok && s1.ok && s2.ok)) continue;
    const double d0 = s1.mu - s0.mu;
    const double d1 = s2.mu - s1.mu;
    if (d0 * d1 < 0.0 && significant(i))
      curve.turning_points.push_back(refine_turn(s0.rho, s2.rho));
  }

  // crossings of mu(rho) - mu*
  if (curve.mu_star) {
    const double ms = *curve.mu_star;
    const double noise = std::max(1e-8 * ms, 1e-12);
    double last_sign = 0.0;
    for (const auto& s : curve.samples) {
      if (!s.ok) continue;
      const double d = s.mu - ms;
      if (std::abs(d) <= noise) continue;
      const double sign = d > 0 ? 1.0 : -1.0;
      if (last_sign != 0.0 && sign != last_sign) ++curve.crossings_of_mu_star;
      last_sign = sign;
    }
  }

  // classification
  bool nondecreasing = true;
  double prev = -kInf;
  bool have_prev = false;
  for (const auto& s : curve.samples) {
    if (!s.ok) continue;
    if (have_prev && s.mu < prev - 1e-9 * std::max(1.0, prev))
      nondecreasing = false;
    prev = s.mu;
    have_prev = true;
  }
  if (curve.turning_points.size() >= 2 && curve.crossings_of_mu_star >= 1)
    curve.classification = "Oscillatory-consistent";
  else if (curve.turning_points.empty() && nondecreasing)
    curve.classification = "Monotone-consistent";
  else
    curve.classification = "Indeterminate";
  return curve;
}

}  // namespace suprad
