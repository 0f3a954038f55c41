// Serial reference vs OpenMP kernels on the unit square.
// Run: build/bench/kernels_bench [--benchmark_filter=...]; OMP_NUM_THREADS sets the team size.

#include "conewalk/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace conewalk;

namespace {

struct Fixture {
  MeshPtr mesh;
  FeFunction u;
  std::vector<double> out;
  std::vector<double> values;

  explicit Fixture(int cells) : mesh(Mesh::create(DomainSpec::unit_square(), cells)) {
    std::mt19937_64 rng(1);
    u = random_field(mesh, rng);
    out.assign(mesh->num_nodes(), 0.0);
    values.assign(static_cast<std::size_t>(mesh->pattern().skeleton.nonZeros()), 0.0);
  }
};

constexpr double kP = 3.0;
constexpr double kEps = 1e-3;

template <bool Parallel>
void BM_Energy(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const double e = Parallel ? kernels::parallel::gradient_energy(*f.mesh, f.u.values(), kP, kEps)
                              : kernels::serial::gradient_energy(*f.mesh, f.u.values(), kP, kEps);
    benchmark::DoNotOptimize(e);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.mesh->num_elements()));
}

template <bool Parallel>
void BM_Residual(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if (Parallel) {
      kernels::parallel::flux_residual(*f.mesh, f.u.values(), kP, kEps, f.out);
    } else {
      kernels::serial::flux_residual(*f.mesh, f.u.values(), kP, kEps, f.out);
    }
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.mesh->num_elements()));
}

template <bool Parallel>
void BM_Jacobian(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if (Parallel) {
      kernels::parallel::flux_jacobian(*f.mesh, f.u.values(), kP, kEps, f.values);
    } else {
      kernels::serial::flux_jacobian(*f.mesh, f.u.values(), kP, kEps, f.values);
    }
    benchmark::DoNotOptimize(f.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.mesh->num_elements()));
}

}  // namespace

BENCHMARK(BM_Energy<false>)->Name("energy/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Energy<true>)->Name("energy/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Residual<false>)->Name("residual/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Residual<true>)->Name("residual/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Jacobian<false>)->Name("jacobian/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Jacobian<true>)->Name("jacobian/parallel")->Arg(64)->Arg(256);

BENCHMARK_MAIN();
