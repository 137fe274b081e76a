#ifndef SUPRAD_NONLINEARITY_IMPL_HPP
#define SUPRAD_NONLINEARITY_IMPL_HPP

#include <limits>
#include <optional>
#include <string>

#include "suprad/nonlinearity.hpp"

namespace suprad {

// Virtual family backend.  The below-zero extension in the bifurcation
// module subclasses this, so it lives in a header.
class NonlinImpl {
 public:
  virtual ~NonlinImpl() = default;

  virtual double f(double u) const = 0;
  virtual double df(double u) const = 0;
  virtual double d2f(double u) const = 0;

  virtual std::optional<double> F_closed(double) const { return std::nullopt; }
  virtual std::optional<double> F_inv_closed(double) const {
    return std::nullopt;
  }
  virtual std::optional<double> lnF_closed(double) const {
    return std::nullopt;
  }
  // Inverse from ln w, for compositions whose w over/underflows.
  virtual std::optional<double> F_inv_ln_closed(double) const {
    return std::nullopt;
  }
  // Overflow-safe F(u) f'(u) where the plain product degenerates.
  virtual std::optional<double> phi_special(double) const {
    return std::nullopt;
  }
  virtual bool phi_exact() const { return false; }
  virtual double curvature_ratio(double u) const;

  virtual std::optional<double> q_analytic() const { return std::nullopt; }
  virtual Kind kind() const = 0;
  virtual DomainClass domain_class() const = 0;
  virtual double domain_min() const {
    return -std::numeric_limits<double>::infinity();
  }
  virtual double u_c2_floor() const { return 1.0; }
  virtual bool is_extended() const { return false; }

  std::string spec_string;
};

}  // namespace suprad

#endif
