#include <benchmark/benchmark.h>

#include "optcache/model.hpp"
#include "optcache/policies.hpp"
#include "optcache/projection.hpp"
#include "optcache/rng.hpp"
#include "optcache/workloads.hpp"

using namespace optcache;

static void BM_ProjectCappedSimplex(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Rng rng(7);
  std::vector<Real> v(static_cast<std::size_t>(N));
  for (auto& x : v) x = rng.uniform(-1.0, 2.0);
  CappedSimplexSpec spec;
  spec.dim = N;
  spec.budget = N / 10.0;
  for (auto _ : state) {
    auto out = project_capped_simplex(v, spec);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ProjectCappedSimplex)->Arg(1000)->Arg(10000);

static void BM_ProjectJointSingleCache(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  CacheNetwork net = make_single_cache(N, N / 100.0);
  Rng rng(11);
  RowSupport sup;
  for (int k = 0; k < 200; ++k)
    sup.ensure(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(N))), 0);
  std::vector<Real> y0(static_cast<std::size_t>(N)), z0(static_cast<std::size_t>(sup.rows()));
  for (auto& v : y0) v = rng.uniform(-0.2, 1.2);
  for (auto& v : z0) v = rng.uniform(-0.2, 1.2);
  for (auto _ : state) {
    std::vector<Real> y = y0, z = z0;
    auto rep = project_joint(net, sup, y, z, 1e-9);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_ProjectJointSingleCache)->Arg(10000);

static void BM_ObcStep(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  CacheNetwork net = make_single_cache(N, N / 100.0);
  ZipfSpec zs{N, 1.1, 3};
  auto reqs = zipf_stream(zs, 512);
  ObcPolicy policy(net);
  std::size_t k = 0;
  for (auto _ : state) {
    const Request& r = reqs[k++ % reqs.size()];
    policy.step(gradient(net, r), GradientVector{});
  }
}
BENCHMARK(BM_ObcStep)->Arg(10000);

BENCHMARK_MAIN();
