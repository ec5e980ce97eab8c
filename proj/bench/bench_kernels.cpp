// OpenMP kernels against their serial reference versions. Run with
// OMP_NUM_THREADS set to compare scaling, e.g.
//   OMP_NUM_THREADS=4 ./mocomp_bench --benchmark_filter=warp
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mocomp/deformation.hpp"
#include "mocomp/hyperelastic.hpp"
#include "mocomp/reference.hpp"
#include "mocomp/wtv.hpp"

using namespace mocomp;

namespace {

struct Inputs {
  ScalarField f, g;
  DisplacementField z;
  TensorField v;
  VectorField p;

  explicit Inputs(int n) : f(Grid2D(n, n)), g(Grid2D(n, n)), z(Grid2D(n, n)), v(Grid2D(n, n)), p(Grid2D(n, n)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (double& x : f.values()) x = d(rng);
    for (double& x : g.values()) x = 0.1 + 0.9 * d(rng);
    for (Vec2& x : p.values()) x = {d(rng) - 0.5, d(rng) - 0.5};
    for (Mat2& m : v.values()) m = {0.1 * (d(rng) - 0.5), 0.1 * (d(rng) - 0.5), 0.1 * (d(rng) - 0.5), 0.1 * (d(rng) - 0.5)};
    const double pi = 3.14159265358979323846;
    for (int y = 1; y < n - 1; ++y)
      for (int x = 1; x < n - 1; ++x)
        z(x, y) = {1.5 * std::sin(pi * x / (n - 1)) * std::sin(pi * y / (n - 1)),
                   -std::sin(2 * pi * x / (n - 1)) * std::sin(pi * y / (n - 1))};
  }
};

const Inputs& inputs(int n) {
  static const Inputs i64(64), i128(128), i256(256), i512(512);
  switch (n) {
    case 64: return i64;
    case 128: return i128;
    case 256: return i256;
    default: return i512;
  }
}

template <typename F>
void run(benchmark::State& state, F&& kernel) {
  const Inputs& in = inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(in));
  state.SetItemsProcessed(state.iterations() * in.f.size());
}

}  // namespace

#define MOCOMP_PAIR(name, parallel, serial)                                    \
  static void BM_##name##_omp(benchmark::State& s) { run(s, parallel); }       \
  static void BM_##name##_serial(benchmark::State& s) { run(s, serial); }      \
  BENCHMARK(BM_##name##_omp)->Arg(64)->Arg(128)->Arg(256)->Arg(512);           \
  BENCHMARK(BM_##name##_serial)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

MOCOMP_PAIR(gradient, [](const Inputs& i) { return gradient(i.f); },
            [](const Inputs& i) { return reference::gradient(i.f); })
MOCOMP_PAIR(divergence, [](const Inputs& i) { return divergence(i.p); },
            [](const Inputs& i) { return reference::divergence(i.p); })
MOCOMP_PAIR(warp, [](const Inputs& i) { return warp(i.f, i.z); },
            [](const Inputs& i) { return reference::warp(i.f, i.z); })
MOCOMP_PAIR(gaussian_blur, [](const Inputs& i) { return gaussian_blur(i.f, 2.0); },
            [](const Inputs& i) { return reference::gaussian_blur(i.f, 2.0); })
MOCOMP_PAIR(jacobian_determinant, [](const Inputs& i) { return jacobian_determinant(i.z); },
            [](const Inputs& i) { return reference::jacobian_determinant(i.z); })
MOCOMP_PAIR(update_v, [](const Inputs& i) { return update_v(i.v, i.z, {1.0, 50.0}, 5.0, 1e-3); },
            [](const Inputs& i) { return reference::update_v(i.v, i.z, {1.0, 50.0}, 5.0, 1e-3); })
MOCOMP_PAIR(prox_wtv_20, [](const Inputs& i) { return prox_wtv(i.f, i.g, 5.0, 20); },
            [](const Inputs& i) { return reference::prox_wtv(i.f, i.g, 5.0, 20, 0.125); })

BENCHMARK_MAIN();
