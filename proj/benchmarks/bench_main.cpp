#include <benchmark/benchmark.h>

#include "suprad/bifurcation.hpp"
#include "suprad/nonlinearity.hpp"
#include "suprad/radial_ode.hpp"
#include "suprad/singular.hpp"

using namespace suprad;

static void BM_shoot_bubble(benchmark::State& state) {
  auto f = make_builtin("power:p=5");
  ShootOpts o;
  o.tol = 1e-6;
  o.r_max = 10.0;
  for (auto _ : state) {
    auto sol = shoot_regular(f, 3, 1.0, o);
    benchmark::DoNotOptimize(sol.u.back());
  }
}
BENCHMARK(BM_shoot_bubble);

static void BM_F_inv_powlog(benchmark::State& state) {
  auto f = make_builtin("powlog:p=3,gamma=2,a=2");
  double w = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.F_inv(w));
    w = w < 1.0 ? w * 1.1 : 1e-3;
  }
}
BENCHMARK(BM_F_inv_powlog);

static void BM_phi_exppow(benchmark::State& state) {
  auto f = make_builtin("exppow:p=2");
  double u = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.phi(u));
    u = u < 1e6 ? u * 1.7 : 1.0;
  }
}
BENCHMARK(BM_phi_exppow);

static void BM_mu_of_rho(benchmark::State& state) {
  auto fe = extend_nonlinearity(make_exp());
  ShootOpts o;
  o.tol = 1e-7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_of_rho(fe, 3, 2.0, o).mu);
  }
}
BENCHMARK(BM_mu_of_rho);

static void BM_construct_singular(benchmark::State& state) {
  auto f = make_exp();
  for (auto _ : state) {
    auto s = construct_singular(f, 3, 1.0);
    benchmark::DoNotOptimize(s.r0_star);
  }
}
BENCHMARK(BM_construct_singular);

BENCHMARK_MAIN();
