// Acceptance runner: one criterion per invocation (ctest) or all of them.
// Criterion 14 spawns the CLI and byte-compares its artifacts.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "suprad/verification.hpp"

namespace {

int run_criteria(const std::string& suite) {
  suprad::VerifyOpts o;
  o.suite = suite;
  auto res = suprad::run_acceptance(o);
  int fails = 0;
  for (const auto& r : res) {
    std::printf("%s %2d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.details.c_str());
    if (!r.pass) ++fails;
  }
  return fails;
}

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_determinism() {
  const std::string cli = SUPRAD_CLI_PATH;
  const std::string t1 = "/tmp/suprad_acc14_j1.json";
  const std::string t2 = "/tmp/suprad_acc14_j8.json";
  const std::string base = "\"" + cli + "\" verify --suite all --out ";
  if (std::system((base + t1 + " --jobs 1 > /dev/null").c_str()) == -1 ||
      std::system((base + t2 + " --jobs 8 > /dev/null").c_str()) == -1) {
    std::printf("FAIL 14 determinism: could not spawn the CLI\n");
    return 1;
  }
  const std::string a = slurp(t1), b = slurp(t2);
  std::remove(t1.c_str());
  std::remove(t2.c_str());
  const bool ok = !a.empty() && a == b;
  std::printf("%s 14 determinism: verify --jobs 1 vs --jobs 8 artifacts %s\n",
              ok ? "PASS" : "FAIL", ok ? "byte-identical" : "differ");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "14") == 0) return run_determinism();
  if (argc > 1) return run_criteria(argv[1]);
  const int fails = run_criteria("core");
  return fails + run_determinism();
}
