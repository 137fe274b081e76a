#ifndef SUPRAD_MORSE_HPP
#define SUPRAD_MORSE_HPP

#include <utility>
#include <vector>

#include "suprad/nonlinearity.hpp"
#include "suprad/singular.hpp"

namespace suprad {

enum class MorseVerdict {
  InfiniteIndexConsistent,
  FiniteIndexConsistent,
  BorderlineInconclusive,
};

const char* morse_verdict_name(MorseVerdict v);

struct MorseReport {
  double c_star = 0.0;  // lim r^2 f'(u*(r))
  double hardy = 0.0;   // (N-2)^2/4
  std::vector<std::pair<double, int>> zero_counts;  // (eps, count)
  MorseVerdict verdict = MorseVerdict::BorderlineInconclusive;
  double q = 0.0;
  Regime regime = Regime::OutOfScope;
};

// Zeros of the linearized equation psi'' + (N-1)/r psi' + f'(u*) psi = 0
// integrated backward from r0* (psi(r0*)=0, psi'(r0*)=-1) down to eps; each
// interior zero marks a negative direction of the quadratic form.
int linearized_zero_count(const Nonlinearity& f, const SingularSolution& sing,
                          double eps, double tol = 1e-10);

// Hardy-threshold diagnostic: c* vs (N-2)^2/4 plus the zero-count ladder.
MorseReport morse_regime_check(const Nonlinearity& f, int N,
                               const SingularOpts& opts = {});

}  // namespace suprad

#endif
