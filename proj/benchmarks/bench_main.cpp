// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: model evaluation, gradient
// accumulation, optimizer steps, and the NMSE metric.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dpd/harness.hpp"
#include "dpd/model.hpp"
#include "dpd/optim.hpp"
#include "dpd/signal.hpp"

namespace {

struct Fixture {
  dpd::WhArchitecture arch;
  dpd::ComplexSignal x;
  dpd::ComplexSignal target;
  dpd::ParamVector theta;
  std::vector<std::size_t> ks;

  explicit Fixture(std::size_t ticks) {
    x = dpd::generate_carrier(ticks, 1, 8);
    target = dpd::apply_ground_truth_distorter(
        x, dpd::MemoryPolyCoeffs::defaults());
    theta = dpd::init_params(arch, dpd::InitMode::seeded_random, 2, 1e-2);
    ks = dpd::valid_indices(arch.memory_depth(), 0, x.size());
  }
};

void BM_forward(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpd::forward(f.theta, f.arch, f.x, f.ks));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.ks.size()));
}
BENCHMARK(BM_forward)->Arg(1024)->Arg(16384);

void BM_loss_and_grad(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dpd::loss_and_grad(f.theta, f.arch, f.x, f.target, f.ks));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.ks.size()));
}
BENCHMARK(BM_loss_and_grad)->Arg(1024)->Arg(16384);

void BM_nmse(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpd::nmse(f.target, f.target, f.x, f.ks));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.ks.size()));
}
BENCHMARK(BM_nmse)->Arg(16384);

// One optimizer update at the default model size (72 real parameters).
void BM_optimizer_step(benchmark::State& state, const std::string& name) {
  const dpd::WhArchitecture arch;
  const std::size_t dim = arch.real_dim();
  dpd::OptimOptions opts;
  auto opt = dpd::make_optimizer(name, opts, dim, dpd::param_blocks(arch));

  std::vector<double> theta(dim, 0.1);
  std::vector<double> grad(dim);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  for (double& g : grad) g = dist(rng);

  for (auto _ : state) {
    (void)opt->query_point(theta);
    opt->step(theta, grad);
    benchmark::DoNotOptimize(theta.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_optimizer_step, adam, "adam");
BENCHMARK_CAPTURE(BM_optimizer_step, adamax, "adamax");
BENCHMARK_CAPTURE(BM_optimizer_step, rmsprop, "rmsprop");
BENCHMARK_CAPTURE(BM_optimizer_step, radam, "radam");
BENCHMARK_CAPTURE(BM_optimizer_step, yogi, "yogi");
BENCHMARK_CAPTURE(BM_optimizer_step, diffgrad, "diffgrad");
BENCHMARK_CAPTURE(BM_optimizer_step, shampoo, "shampoo");
BENCHMARK_CAPTURE(BM_optimizer_step, lookahead_adam, "lookahead-adam");
BENCHMARK_CAPTURE(BM_optimizer_step, accmbsgd, "accmbsgd");
BENCHMARK_CAPTURE(BM_optimizer_step, sgd, "sgd");

}  // namespace

BENCHMARK_MAIN();
