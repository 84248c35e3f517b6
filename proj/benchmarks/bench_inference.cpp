// Copyright 2026 The structmf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Microbenchmarks for the hot paths: table algebra, tree calibration, and
// one full coordinate sweep of each approximation family. Model sizes stay
// inside the default width limit so every case actually runs.

#include <benchmark/benchmark.h>

#include <vector>

#include "structmf/brute_force.hpp"
#include "structmf/directed_mf.hpp"
#include "structmf/jt_approx.hpp"
#include "structmf/junction_tree.hpp"
#include "structmf/mean_field.hpp"
#include "structmf/model.hpp"
#include "structmf/random_models.hpp"
#include "structmf/rng.hpp"
#include "structmf/table.hpp"

using namespace structmf;

namespace {

std::vector<Cluster> singletons(int n) {
  std::vector<Cluster> out;
  for (int v = 0; v < n; ++v) out.push_back(Cluster{v});
  return out;
}

// Sweeps with tol = 0 never early-out, so each iteration pays for a full
// pass over every cluster regardless of how converged the state is.
OptimizeOptions one_full_sweep() {
  OptimizeOptions opts;
  opts.tol = 0.0;
  opts.max_sweeps = 1;
  return opts;
}

void BM_TableProductMarginal(benchmark::State& state) {
  int rank = static_cast<int>(state.range(0));
  Rng rng(7001);
  std::vector<int> scope_a, scope_b;
  for (int v = 0; v < rank; ++v) scope_a.push_back(v);
  for (int v = rank / 2; v < rank + rank / 2; ++v) scope_b.push_back(v);
  CardinalityMap card(static_cast<std::size_t>(rank + rank / 2), 2);
  std::vector<int> dims(static_cast<std::size_t>(rank), 2);
  std::vector<Table> factors = {Table(Cluster(scope_a), dims),
                                Table(Cluster(scope_b), dims)};
  for (Table& t : factors)
    for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    Table prod = log_product(factors, card);
    benchmark::DoNotOptimize(log_marginal(prod, Cluster(scope_a)));
  }
}
BENCHMARK(BM_TableProductMarginal)->Arg(4)->Arg(8)->Arg(12);

void BM_TreeCalibration(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(7002);
  TargetModel p = random_tree_model(rng, n, 2, 1.0);
  for (auto _ : state) {
    CompiledTree tree = compile_model_tree(p);
    benchmark::DoNotOptimize(tree.log_z());
  }
}
BENCHMARK(BM_TreeCalibration)->Arg(8)->Arg(32)->Arg(128);

void BM_Enumeration(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(7003);
  TargetModel p = random_pairwise_model(rng, n, 0.4, 1.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_marginals(p, singletons(n)));
  }
}
BENCHMARK(BM_Enumeration)->Arg(8)->Arg(12)->Arg(16);

void BM_FactorizedSweep(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(7004);
  TargetModel p = random_pairwise_model(rng, n, 0.4, 1.0, 0.5);
  UndirectedApprox q = make_undirected_approx(p, singletons(n));
  OptimizeOptions opts = one_full_sweep();
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(q, p, opts));
  }
}
BENCHMARK(BM_FactorizedSweep)->Arg(8)->Arg(16)->Arg(32);

void BM_ConditionalSweep(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(7005);
  TargetModel p = random_pairwise_model(rng, n, 0.4, 1.0, 0.5);
  DirectedApprox q = make_directed_approx(p, singletons(n));
  OptimizeOptions opts = one_full_sweep();
  for (auto _ : state) {
    benchmark::DoNotOptimize(directed_optimize(q, p, opts));
  }
}
BENCHMARK(BM_ConditionalSweep)->Arg(8)->Arg(16)->Arg(32);

void BM_TreePotentialSweep(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(7006);
  TargetModel p = random_tree_model(rng, n, 2, 1.0);
  std::vector<Cluster> clusters;
  for (const Table& f : p.factors)
    if (f.scope().size() == 2) clusters.push_back(f.scope());
  if (clusters.empty()) clusters = singletons(n);
  JunctionTreeApprox q = make_jt_approx(p, clusters);
  OptimizeOptions opts = one_full_sweep();
  for (auto _ : state) {
    benchmark::DoNotOptimize(jt_optimize(q, p, opts));
  }
}
BENCHMARK(BM_TreePotentialSweep)->Arg(8)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
