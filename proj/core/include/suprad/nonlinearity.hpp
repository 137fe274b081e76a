#ifndef SUPRAD_NONLINEARITY_HPP
#define SUPRAD_NONLINEARITY_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace suprad {

enum class Kind {
  Power,        // (u+a)^p, p>1, a>=0
  Exponential,  // e^u
  ExpPower,     // exp(u^p), p>=1
  IteratedExp,  // exp(exp(...exp(u)...)), n>=2
  PowerLog,     // (u+a)^p log(u+a)^gamma, p>1, gamma>=0, a>1
  Tetration,    // (u+a)^(u+a)^... n-th tetration, n>=2, a>1
  Custom,
};

enum class DomainClass { F11, F12 };

class NonlinImpl;

// Immutable nonlinearity with evaluators for f, f', f'', the decreasing
// primitive F(u) = int_u^inf dt/f(t), its inverse, and the product
// phi(u) = F(u) f'(u) in an overflow-safe form.  Cheap to copy.
class Nonlinearity {
 public:
  Nonlinearity() = default;
  explicit Nonlinearity(std::shared_ptr<const NonlinImpl> impl);

  double f(double u) const;
  double df(double u) const;
  double d2f(double u) const;

  // F and its inverse.  F throws PreconditionError outside the domain and
  // NumericError on quadrature failure; F_inv throws NumericError when w is
  // outside the range of F (bracketing failure after 200 doublings).
  double F(double u) const;
  double F_inv(double w) const;

  // F(u)*f'(u) without forming the over/underflowing factors.
  double phi(double u) const;
  // True when phi(u) == q identically (power and exponential families).
  bool phi_exact() const;
  // f'(u)^2 / (f(u) f''(u)) in a saturation-safe form.
  double curvature_ratio(double u) const;

  std::optional<double> q_analytic() const;
  // Closed-form log F when available (used for similarity composition at
  // center values whose F under/overflows).
  std::optional<double> lnF(double u) const;
  // Closed-form F^-1(e^lw); same use.
  std::optional<double> F_inv_ln(double lw) const;

  Kind kind() const;
  DomainClass domain_class() const;
  double domain_min() const;  // open lower end; -inf when unbounded below
  double u_c2_floor() const;
  bool extended() const;  // carries the below-zero extension of the
                          // bifurcation module
  bool has_closed_F() const;
  const std::string& spec() const;

  bool valid() const { return impl_ != nullptr; }
  const NonlinImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const NonlinImpl> impl_;
};

// Parses the spec grammar `name[:key=value(,key=value)*]` with names
// power|exp|exppow|iterexp|powlog|tetration.  Throws ParseError on malformed
// input and ConstraintError on out-of-range parameters.
Nonlinearity make_builtin(std::string_view spec);

// Direct constructors, bypassing the decimal grammar (exact parameters).
Nonlinearity make_power(double p, double a);
Nonlinearity make_exp();

// Numeric F by adaptive quadrature plus the tail estimate qhat/f'(T), T
// doubled until the tail correction is stationary to 1e-12 relative.
// Exposed for the closed-form-vs-quadrature checks.
double numeric_F(const Nonlinearity& f, double u);

struct QEstimate {
  double q = 0.0;
  int nodes = 0;
  double seq_gap = 0.0;      // |last extrapolant - previous|
  double cross_check = 0.0;  // curvature ratio at the last node
  bool converged = false;
};

// Limit of F(u) f'(u) on the ladder u_j = max(u_c2_floor,1)*10^j with
// extrapolation; asserts the Lemma q >= 1 bound.
QEstimate estimate_q(const Nonlinearity& f);

enum class Regime { Critical, Oscillatory, Stable, BorderlineJL, OutOfScope };

const char* regime_name(Regime r);

struct ExponentReport {
  int N = 0;
  double q = 0.0;
  double p = 0.0;  // q/(q-1); +inf when q == 1
  double q_S = 0.0;
  double q_JL = 0.0;
  double p_S = 0.0;   // +inf sentinel for N == 2
  double p_JL = 0.0;  // +inf sentinel for N <= 10
  double k = 0.0;     // 2N - 4q
  Regime regime = Regime::OutOfScope;
  bool at_jl_boundary = false;  // |q - q_JL| <= tol
};

ExponentReport classify(const Nonlinearity& f, int N);

struct SuperlinearityReport {
  bool pass = false;
  double p_bar = 0.0;
  double worst_margin = 0.0;  // min over samples of 1 - (1+p_bar) H/(u f)
  double u_at_worst = 0.0;
};

// Verifies u f(u+M) >= (1+p_bar) int_0^u f(t+M) dt on a log grid above
// u_floor, p_bar slightly above (N+2)/(N-2).
SuperlinearityReport check_superlinearity(const Nonlinearity& f, int N,
                                          double u_floor, double shift_M,
                                          double p_bar_slack = 0.01);

}  // namespace suprad

#endif
