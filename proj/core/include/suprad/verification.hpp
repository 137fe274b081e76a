#ifndef SUPRAD_VERIFICATION_HPP
#define SUPRAD_VERIFICATION_HPP

#include <string>
#include <vector>

namespace suprad {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;  // deterministic text (no wall-clock values)
};

struct VerifyOpts {
  int jobs = 1;
  // "all"/"core" or a single criterion id as text; "core" == ids 1..13.
  std::string suite = "core";
};

int acceptance_count();

// Runs the built-in acceptance criteria (1..13; 14 is the CLI determinism
// check).  Results are ordered by id and independent of the job count.
std::vector<CriterionResult> run_acceptance(const VerifyOpts& opts = {});

}  // namespace suprad

#endif
