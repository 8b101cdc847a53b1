// Serial reference vs OpenMP kernels for the LM inner loops.
// Args: {samples, hidden}; 18 inputs as in the full exogenous feature set.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "solarcast/kernels.hpp"

using namespace solarcast::kernels;

namespace {

constexpr std::size_t kInputs = 18;

struct Fixture {
  std::size_t n, hidden, p;
  std::vector<double> params, x, e, jac, y_hat, jtj, jte;

  Fixture(std::size_t n_, std::size_t hidden_) : n(n_), hidden(hidden_) {
    p = hidden * kInputs + 2 * hidden + 1;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    params.resize(p);
    x.resize(n * kInputs);
    e.resize(n);
    for (auto& v : params) v = u(rng);
    for (auto& v : x) v = u(rng);
    for (auto& v : e) v = u(rng);
    jac.resize(n * p);
    y_hat.resize(n);
    jtj.resize(p * p);
    jte.resize(p);
  }
  NetView net() const { return {kInputs, hidden, params}; }
};

void forward(benchmark::State& state, Backend b) {
  Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    forward_batch(b, f.net(), f.x, f.n, f.y_hat);
    benchmark::DoNotOptimize(f.y_hat.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.n));
}

void jacobian(benchmark::State& state, Backend b) {
  Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    jacobian(b, f.net(), f.x, f.n, f.jac, f.y_hat);
    benchmark::DoNotOptimize(f.jac.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.n));
}

void normal_eq(benchmark::State& state, Backend b) {
  Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  jacobian(Backend::serial, f.net(), f.x, f.n, f.jac, f.y_hat);
  for (auto _ : state) {
    normal_equations(b, f.jac, f.n, f.p, f.e, f.jtj, f.jte);
    benchmark::DoNotOptimize(f.jtj.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.n));
}

void args(benchmark::internal::Benchmark* b) {
  for (long n : {2000L, 10000L})
    for (long h : {4L, 10L, 20L}) b->Args({n, h});
}

}  // namespace

BENCHMARK_CAPTURE(forward, serial, Backend::serial)->Apply(args);
BENCHMARK_CAPTURE(forward, parallel, Backend::parallel)->Apply(args);
BENCHMARK_CAPTURE(jacobian, serial, Backend::serial)->Apply(args);
BENCHMARK_CAPTURE(jacobian, parallel, Backend::parallel)->Apply(args);
BENCHMARK_CAPTURE(normal_eq, serial, Backend::serial)->Apply(args);
BENCHMARK_CAPTURE(normal_eq, parallel, Backend::parallel)->Apply(args);

BENCHMARK_MAIN();
