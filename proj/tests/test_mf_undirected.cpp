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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "structmf/brute_force.hpp"
#include "structmf/elimination.hpp"
#include "structmf/junction_tree.hpp"
#include "structmf/mean_field.hpp"
#include "structmf/model.hpp"
#include "structmf/random_models.hpp"
#include "structmf/rng.hpp"
#include "support/dense_minimizer.hpp"
#include "support/generators.hpp"

using namespace structmf;

namespace {

std::vector<Cluster> factor_scopes(const TargetModel& m) {
  std::vector<Cluster> out;
  for (const Table& f : m.factors) out.push_back(f.scope());
  return out;
}

// Clusters matching the target's own junction tree nodes.
std::vector<Cluster> exact_clusters(const TargetModel& m) {
  return tree_structure_from_clusters(factor_scopes(m),
                                      static_cast<int>(m.variables.size()))
      .nodes;
}

}  // namespace

TEST_CASE("matching the target structure is exact after one sweep") {
  Rng rng(905);
  for (int rep = 0; rep < 8; ++rep) {
    TargetModel p = rep % 2 == 0 ? random_tree_model(rng, 6, 2, 1.0)
                                 : random_pairwise_model(rng, 5, 0.5, 1.0, 0.5);
    for (auto kind : {Schedule::Kind::kReverse, Schedule::Kind::kSequential}) {
      UndirectedApprox q = make_undirected_approx(p, exact_clusters(p));
      OptimizeOptions opts;
      opts.schedule.kind = kind;
      opts.max_sweeps = 1;
      optimize(q, p, opts);
      CHECK(kl_divergence(q.q_tree, p) <= 1e-9);
    }
  }
}

TEST_CASE("free energy never increases along the trace") {
  Rng rng(906);
  for (int rep = 0; rep < 3; ++rep) {
    TargetModel p = random_pairwise_model(rng, 6, 0.6, 1.5, 0.7);
    for (auto kind : {Schedule::Kind::kSequential, Schedule::Kind::kReverse,
                      Schedule::Kind::kRandom}) {
      UndirectedApprox q =
          make_undirected_approx(p, testing::singleton_clusters(6));
      OptimizeOptions opts;
      opts.schedule.kind = kind;
      opts.schedule.seed = 17;
      opts.max_sweeps = 60;
      DescentReport rep_out = optimize(q, p, opts);
      REQUIRE(rep_out.fe_trace.size() >= 2);
      for (std::size_t i = 1; i < rep_out.fe_trace.size(); ++i)
        CHECK(rep_out.fe_trace[i] <= rep_out.fe_trace[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("random schedules still converge") {
  Rng rng(907);
  TargetModel p = random_pairwise_model(rng, 6, 0.5, 1.0, 0.5);
  UndirectedApprox q = make_undirected_approx(p, testing::singleton_clusters(6));
  OptimizeOptions opts;
  opts.schedule.kind = Schedule::Kind::kRandom;
  opts.schedule.seed = 4;
  opts.max_sweeps = 10 * 6;
  DescentReport r = optimize(q, p, opts);
  CHECK(r.converged);
}

TEST_CASE("a converged potential is a coordinatewise minimum") {
  Rng rng(908);
  TargetModel p = random_pairwise_model(rng, 4, 0.8, 1.0, 0.5);
  UndirectedApprox q = make_undirected_approx(
      p, {Cluster{0, 1}, Cluster{1, 2}, Cluster{3}});
  OptimizeOptions opts;
  opts.tol = 1e-12;
  opts.max_sweeps = 400;
  DescentReport r = optimize(q, p, opts);
  REQUIRE(r.converged);
  double fe0 = free_energy(q.q_tree, p);

  Rng perturb(909);
  for (int trial = 0; trial < 100; ++trial) {
    int gamma = static_cast<int>(perturb.uniform_int(3));
    Table saved = q.variational[static_cast<std::size_t>(gamma)];
    Table& phi = q.variational[static_cast<std::size_t>(gamma)];
    for (double& v : phi.values()) v += perturb.uniform(-1.0, 1.0);
    rebuild_q_tree(q);
    CHECK(free_energy(q.q_tree, p) >= fe0 - 1e-12);
    q.variational[static_cast<std::size_t>(gamma)] = saved;
  }
  rebuild_q_tree(q);
}

TEST_CASE("terms outside the dependency sets only shift by a constant") {
  Rng rng(910);
  // Two independent blocks: {0,1} coupled, {2,3} coupled, no cross terms.
  std::vector<std::vector<double>> w(4, std::vector<double>(4, 0.0));
  w[0][1] = w[1][0] = 1.2;
  w[2][3] = w[3][2] = -0.9;
  TargetModel p = build_boltzmann(w, {0.3, -0.2, 0.5, 0.1},
                                  BoltzmannEncoding::kZeroOne);
  UndirectedApprox q = make_undirected_approx(p, testing::singleton_clusters(4));
  seed_variational(q, 11, 0.3);
  UndirectedApprox q_full = q;

  DependencySets narrow = dependency_sets(q, p, 0);
  // The narrow sets must exclude everything supported on the other block.
  for (int a : narrow.target_factors)
    CHECK(p.factors[static_cast<std::size_t>(a)].scope().intersects(
        Cluster{0, 1}));
  for (int b : narrow.other_clusters) CHECK(b == 1);

  DependencySets full;
  for (int a = 0; a < static_cast<int>(p.factors.size()); ++a)
    full.target_factors.push_back(a);
  for (int b = 1; b < 4; ++b) full.other_clusters.push_back(b);

  mf_update(q, p, 0);
  mf_update_with_sets(q_full, p, 0, full);
  const Table& lhs = q.variational[0];
  const Table& rhs = q_full.variational[0];
  for (std::size_t i = 0; i < lhs.size(); ++i)
    CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-12);
}

TEST_CASE("copied factors stay verbatim and close the family exactly") {
  std::vector<std::vector<double>> w(2, std::vector<double>(2, 0.0));
  w[0][1] = w[1][0] = 3.0;
  TargetModel p = build_boltzmann(w, {0.4, -0.7},
                                  BoltzmannEncoding::kZeroOne);
  // The pairwise factor is factor index 0 (pair factors come first).
  REQUIRE(p.factors[0].scope() == Cluster({0, 1}));

  UndirectedApprox q = make_undirected_approx(
      p, testing::singleton_clusters(2), {0});
  seed_variational(q, 21, 0.5);
  OptimizeOptions opts;
  opts.tol = 1e-11;
  opts.max_sweeps = 500;
  DescentReport r = optimize(q, p, opts);
  CHECK(r.converged);
  // Q can represent P exactly here, so the divergence vanishes.
  CHECK(kl_divergence(q.q_tree, p) <= 1e-8);
  CHECK(q.copied[0].values() == p.factors[0].values());

  // The same target with the pair as one adjustable cluster needs exactly
  // one sweep; the copied parameterization contracts over several.
  UndirectedApprox q1 = make_undirected_approx(p, {Cluster{0, 1}});
  OptimizeOptions one;
  one.max_sweeps = 1;
  optimize(q1, p, one);
  CHECK(kl_divergence(q1.q_tree, p) <= 1e-10);
  CHECK(r.sweeps > 1);
  CHECK(r.sweeps <= 60);
}

TEST_CASE("the represented distribution is always normalized") {
  Rng rng(912);
  TargetModel p = random_pairwise_model(rng, 5, 0.6, 1.0, 0.5);
  UndirectedApprox q = make_undirected_approx(
      p, {Cluster{0, 1}, Cluster{2}, Cluster{3, 4}});
  seed_variational(q, 5, 0.4);
  for (int g = 0; g < 3; ++g) mf_update(q, p, g);
  Table joint = q.q_tree.marginal(Cluster{0, 1, 2, 3, 4});
  double total = 0.0;
  for (double v : joint.values()) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("richer structures never do worse at convergence") {
  TargetModel p = testing::asia_model();

  UndirectedApprox fact = make_undirected_approx(
      p, testing::singleton_clusters(8));
  OptimizeOptions opts;
  opts.max_sweeps = 300;
  optimize(fact, p, opts);
  double kl_fact = kl_divergence(fact.q_tree, p);

  // Grow the structure, starting from the factorized optimum so the richer
  // family begins at the same divergence it is meant to beat.
  UndirectedApprox tree = make_undirected_approx(p, exact_clusters(p));
  init_from_distribution(tree, fact.q_tree);
  double kl_init = kl_divergence(tree.q_tree, p);
  CHECK(kl_init == doctest::Approx(kl_fact).epsilon(1e-9));
  optimize(tree, p, opts);
  double kl_tree = kl_divergence(tree.q_tree, p);
  CHECK(kl_tree <= kl_fact + 1e-9);
  // The full structure is exact on this model.
  CHECK(kl_tree <= 1e-9);
  CHECK(kl_fact > 1e-3);  // genuinely lossy at the factorized end
}

TEST_CASE("a conditionally independent pair factorizes at the optimum") {
  Rng rng(913);
  for (int rep = 0; rep < 20; ++rep) {
    TargetModel p = testing::fork_model_random(rng);
    UndirectedApprox q =
        make_undirected_approx(p, {Cluster{0}, Cluster{1, 2}});
    OptimizeOptions opts;
    opts.tol = 1e-12;
    opts.max_sweeps = 400;
    DescentReport r = optimize(q, p, opts);
    REQUIRE(r.converged);
    double gap = factorization_gap(q.q_tree, Cluster{1, 2},
                                   {Cluster{1}, Cluster{2}});
    CHECK(gap >= -1e-12);
    CHECK(gap <= 1e-9);
  }
}

TEST_CASE("factorization gap validates its partition") {
  TargetModel p = testing::fork_model();
  CompiledTree q = compile_model_tree(p);
  CHECK_THROWS_AS(
      factorization_gap(q, Cluster{1, 2}, {Cluster{1}, Cluster{1}}),
      ValidationError);
  CHECK_THROWS_AS(factorization_gap(q, Cluster{1, 2}, {Cluster{1}}),
                  ValidationError);
  CHECK_THROWS_AS(
      factorization_gap(q, Cluster{1, 2}, {Cluster{1}, Cluster{0}}),
      ValidationError);
}

TEST_CASE("chain family matches a direct minimization of the free energy") {
  TargetModel p = testing::triangle_model(4.0);
  UndirectedApprox q =
      make_undirected_approx(p, {Cluster{0, 1}, Cluster{1, 2}});
  OptimizeOptions opts;
  opts.tol = 1e-13;
  opts.max_sweeps = 2000;
  optimize(q, p, opts);
  double fe_mf = free_energy(q.q_tree, p);

  auto objective = [&](const std::vector<double>& x) {
    Table t01(Cluster{0, 1}, {2, 2}, {x[0], x[1], x[2], x[3]});
    Table t12(Cluster{1, 2}, {2, 2}, {x[4], x[5], x[6], x[7]});
    return testing::free_energy_by_enumeration({t01, t12}, p);
  };
  std::vector<double> from_mf;
  for (double v : q.variational[0].values()) from_mf.push_back(v);
  for (double v : q.variational[1].values()) from_mf.push_back(v);
  testing::MinimizeResult direct =
      testing::minimize(objective, std::vector<double>(8, 0.0));
  testing::MinimizeResult polished = testing::minimize(objective, from_mf);
  double fe_dense = std::min(direct.value, polished.value);
  CHECK(std::abs(fe_mf - fe_dense) <= 1e-6);
}

TEST_CASE("construction rejects broken inputs") {
  TargetModel p = testing::fork_model();
  CHECK_THROWS_AS(make_undirected_approx(p, {}), ValidationError);
  CHECK_THROWS_AS(make_undirected_approx(p, {Cluster{0}, Cluster{1}}),
                  ValidationError);  // variable 2 uncovered
  CHECK_THROWS_AS(make_undirected_approx(p, {Cluster{0, 1, 7}}),
                  ValidationError);
  CHECK_THROWS_AS(
      make_undirected_approx(p, testing::singleton_clusters(3), {0, 0}),
      ValidationError);
  CHECK_THROWS_AS(
      make_undirected_approx(p, testing::singleton_clusters(3), {9}),
      ValidationError);
}

TEST_CASE("event discrepancies respect the divergence bound after fitting") {
  Rng rng(914);
  for (int rep = 0; rep < 5; ++rep) {
    TargetModel p = random_pairwise_model(rng, 5, 0.6, 1.2, 0.5);
    UndirectedApprox q =
        make_undirected_approx(p, testing::singleton_clusters(5));
    OptimizeOptions opts;
    opts.max_sweeps = 200;
    optimize(q, p, opts);
    double kl = kl_divergence(q.q_tree, p);
    EventBound b = whittaker_event_bound(q.q_tree, p, kl);
    CHECK(b.holds());
  }
}
