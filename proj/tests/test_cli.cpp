#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

const std::string kCli = SUPRAD_CLI_PATH;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string tmp = "/tmp/suprad_cli_test_out.txt";
  const std::string cmd = "\"" + kCli + "\" " + args + " > " + tmp + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream is(tmp);
  std::stringstream ss;
  ss << is.rdbuf();
  std::remove(tmp.c_str());
  return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("classify emits the exponent report") {
  auto r = run("classify --f exp --N 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"q\": 1.0") != std::string::npos);
  CHECK(r.out.find("\"regime\": \"Oscillatory\"") != std::string::npos);
  CHECK(r.out.find("\"k\": 2.0") != std::string::npos);
  CHECK(r.out.find("0.0428932188") != std::string::npos);
  CHECK(r.out.find("\"p\": \"inf\"") != std::string::npos);
}

TEST_CASE("exit codes by failure class") {
  CHECK(run("classify --f bogus --N 3").code == 1);          // parse
  CHECK(run("classify --f power:p=0.5 --N 3").code == 1);    // constraint
  CHECK(run("singular --f power:p=5 --N 3").code == 3);      // q = q_S
  CHECK(run("bifurcate --f power:p=5 --N 3 --points 5").code == 4);  // (f1')
  CHECK(run("shoot --f exp --N 3 --rho 1 --out /tmp/x.csv "
            "--r-max 1 --tol 1").code == 4);  // tol out of range
}

TEST_CASE("shoot writes a deterministic csv") {
  const std::string p1 = "/tmp/suprad_t1.csv", p2 = "/tmp/suprad_t2.csv";
  auto r1 = run("shoot --f exp --N 3 --rho 1 --r-max 2 --tol 1e-7 --out " + p1);
  auto r2 = run("shoot --f exp --N 3 --rho 1 --r-max 2 --tol 1e-7 --out " + p2);
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  const std::string a = slurp(p1), b = slurp(p2);
  CHECK(a.rfind("r,u,du\n", 0) == 0);
  CHECK(a == b);
  CHECK(!a.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("intersect emits the report schema") {
  auto r = run("intersect --f power:p=5 --N 3 --p0 limit:1 --p1 limit:2 "
               "--b 10 --tol 1e-9");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"count\": 1") != std::string::npos);
  CHECK(r.out.find("\"zeros\"") != std::string::npos);
  CHECK(r.out.find("0.8660254") != std::string::npos);
  CHECK(r.out.find("\"near_tangencies\"") != std::string::npos);
  CHECK(r.out.find("\"truncated\"") != std::string::npos);
}

TEST_CASE("bifurcate summary on a small monotone sweep") {
  auto r = run("bifurcate --f exp --N 10 --rho-min 0.1 --rho-max 30 "
               "--points 16");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"classification\": \"Monotone-consistent\"") !=
        std::string::npos);
  CHECK(r.out.find("\"mu_star\": 15.99999") != std::string::npos);
  CHECK(r.out.find("\"crossings\": 0") != std::string::npos);
}

TEST_CASE("singular summary fields") {
  auto r = run("singular --f exp --N 3 --r-max 10");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"r0_star\": 1.414213562") != std::string::npos);
  CHECK(r.out.find("\"D\": -7.0") != std::string::npos);
}

TEST_CASE("morse summary fields") {
  auto r = run("morse --f exp --N 12");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"verdict\": \"FiniteIndexConsistent\"") !=
        std::string::npos);
  CHECK(r.out.find("\"c_star\"") != std::string::npos);
  CHECK(r.out.find("\"hardy\": 25.0") != std::string::npos);
}

TEST_CASE("verify runs a single criterion") {
  auto r = run("verify --suite 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS  1") != std::string::npos);
}

}  // TEST_SUITE
