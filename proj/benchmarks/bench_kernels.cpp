#include <benchmark/benchmark.h>

#include "moistpe/elliptic.hpp"
#include "moistpe/initial.hpp"
#include "moistpe/microphysics.hpp"
#include "moistpe/operators.hpp"
#include "moistpe/timestepper.hpp"

using namespace moistpe;

namespace {

RunConfig desk(int n) {
  RunConfig c;
  c.grid = {n, n, n / 2, 1.0e5, 1.0e5, 2.0e4, 1.0e5};
  c.time.horizon = 3600.0;
  return c;
}

void BM_Step(benchmark::State& bs) {
  const RunConfig c = desk(static_cast<int>(bs.range(0)));
  const Grid g = build_grid(c);
  Stepper st(c, g);
  const State s0 = make_initial_state(c, g, 7);
  const double dt = cfl_dt(s0, g, c.params, c.time);
  State s = s0;
  for (auto _ : bs) {
    st.step(s, dt);
    if (s.time > 1800.0) s = s0;
  }
  bs.SetItemsProcessed(bs.iterations() * static_cast<long>(g.cells()));
}
BENCHMARK(BM_Step)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Projection(benchmark::State& bs) {
  const RunConfig c = desk(static_cast<int>(bs.range(0)));
  const Grid g = build_grid(c);
  const State s0 = make_initial_state(c, g, 7);
  Array3 u0 = s0.u, v0 = s0.v;
  for (double& x : u0.values()) x += 0.1;  // give the solver a nonzero divergence to remove
  for (auto _ : bs) {
    Array3 u = u0, v = v0;
    benchmark::DoNotOptimize(project_barotropic(u, v, g, c.solver).iterations);
  }
}
BENCHMARK(BM_Projection)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Microphysics(benchmark::State& bs) {
  const RunConfig c = desk(16);
  const Grid g = build_grid(c);
  const State s = make_initial_state(c, g, 7);
  for (auto _ : bs)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.np; ++k) {
          const MoistCell cell{s.t(i, j, k), s.qv(i, j, k), 1e-4, 2e-4};
          benchmark::DoNotOptimize(microphysics_update(cell, g.p[k], 30.0, 1e-2, c.params));
        }
  bs.SetItemsProcessed(bs.iterations() * static_cast<long>(g.cells()));
}
BENCHMARK(BM_Microphysics);

void BM_Tridiagonal(benchmark::State& bs) {
  RunConfig c = desk(16);
  c.grid.np = static_cast<int>(bs.range(0));
  const Grid g = build_grid(c);
  const Array3 f0 = make_initial_state(c, g, 7).t;
  for (auto _ : bs) {
    Array3 f = f0;
    benchmark::DoNotOptimize(implicit_vertical_diffusion(f, 10.0, 1e-4, 295.0, 60.0, g));
  }
  bs.SetItemsProcessed(bs.iterations() * static_cast<long>(g.cells()));
}
BENCHMARK(BM_Tridiagonal)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
