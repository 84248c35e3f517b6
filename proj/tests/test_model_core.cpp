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
#include "structmf/model.hpp"
#include "structmf/random_models.hpp"
#include "structmf/rng.hpp"
#include "support/generators.hpp"

using namespace structmf;

TEST_CASE("zero-energy pairwise model is uniform with Z = 8") {
  std::vector<std::vector<double>> w(3, std::vector<double>(3, 0.0));
  TargetModel m = build_boltzmann(w, {0, 0, 0}, BoltzmannEncoding::kZeroOne);
  validate_model(m);
  EnumerationResult e = enumerate_joint(m);
  CHECK(std::exp(e.log_z) == doctest::Approx(8.0).epsilon(1e-12));
  for (double lp : e.log_joint.values())
    CHECK(lp == doctest::Approx(-std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("single coupling shows up as a score ratio") {
  std::vector<std::vector<double>> w(3, std::vector<double>(3, 0.0));
  w[0][1] = w[1][0] = 1.0;
  TargetModel m = build_boltzmann(w, {0, 0, 0}, BoltzmannEncoding::kZeroOne);
  double s11 = unnormalized_log_score(m, Assignment{{1, 1, 0}});
  double s00 = unnormalized_log_score(m, Assignment{{0, 0, 0}});
  CHECK(s11 - s00 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s11 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pairwise marginals match enumeration") {
  Rng rng(123);
  for (int rep = 0; rep < 5; ++rep) {
    TargetModel m = random_pairwise_model(rng, 4, 0.9, 1.0, 0.5);
    validate_model(m);
    MarginalsResult r =
        brute_force_marginals(m, {Cluster{0}, Cluster{1}, Cluster{2, 3}});
    // Independent recomputation from raw scores.
    double z = 0.0;
    std::vector<double> m0(2, 0.0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            double p = std::exp(
                unnormalized_log_score(m, Assignment{{a, b, c, d}}));
            z += p;
            m0[static_cast<std::size_t>(a)] += p;
          }
    CHECK(r.marginals[0][0] == doctest::Approx(m0[0] / z).epsilon(1e-12));
    CHECK(r.marginals[0][1] == doctest::Approx(m0[1] / z).epsilon(1e-12));
    CHECK(std::exp(r.log_z) == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("boltzmann constructor rejects bad weight matrices") {
  std::vector<std::vector<double>> w(2, std::vector<double>(2, 0.0));
  w[0][1] = 1.0;  // asymmetric
  CHECK_THROWS_AS(build_boltzmann(w, {0, 0}, BoltzmannEncoding::kZeroOne),
                  ValidationError);
  w[1][0] = 1.0;
  CHECK_THROWS_AS(build_boltzmann(w, {0}, BoltzmannEncoding::kZeroOne),
                  ValidationError);
  w[0][0] = 0.5;
  CHECK_THROWS_AS(build_boltzmann(w, {0, 0}, BoltzmannEncoding::kZeroOne),
                  ValidationError);
}

TEST_CASE("two-unit coupled pair has P(1,1) = e/(3+e)") {
  std::vector<std::vector<double>> w(2, std::vector<double>(2, 0.0));
  w[0][1] = w[1][0] = 1.0;
  TargetModel m = build_boltzmann(w, {0, 0}, BoltzmannEncoding::kZeroOne);
  EnumerationResult e = enumerate_joint(m);
  std::vector<int> st{1, 1};
  double p11 = std::exp(e.log_joint[e.log_joint.flat_index(st)]);
  CHECK(p11 ==
        doctest::Approx(std::exp(1.0) / (3.0 + std::exp(1.0))).epsilon(1e-14));
}

TEST_CASE("single-root network transcribes its table") {
  TargetModel m = bayesian_network_to_target({{0, "r", 2}}, {{0, {}, {0.3, 0.7}}});
  REQUIRE(m.factors.size() == 1);
  CHECK(m.factors[0][0] == doctest::Approx(std::log(0.3)));
  CHECK(m.factors[0][1] == doctest::Approx(std::log(0.7)));
  REQUIRE(m.log_z.has_value());
  CHECK(*m.log_z == 0.0);
}

TEST_CASE("network joint sums to one and respects the stated layout") {
  TargetModel m = testing::asia_model();
  validate_model(m);
  EnumerationResult e = enumerate_joint(m);
  CHECK(e.log_z == doctest::Approx(0.0).epsilon(1e-10));

  // Spot-check one conditional row through the layout: the dyspnoea table
  // row for bronc=1, either=0 is (0.2, 0.8).
  const Table& dysp = m.factors[7];
  REQUIRE(dysp.scope() == Cluster({4, 5, 7}));
  std::vector<int> st{1, 0, 1};
  CHECK(dysp[dysp.flat_index(st)] == doctest::Approx(std::log(0.8)));
}

TEST_CASE("deterministic rows are floored, never -inf") {
  std::vector<Variable> vars{{0, "a", 2}, {1, "b", 2}, {2, "c", 2}};
  std::vector<Cpt> cpts;
  cpts.push_back({0, {}, {1.0, 0.0}});
  cpts.push_back({1, {0}, {1, 0, 0, 1}});
  cpts.push_back({2, {1}, {0, 1, 1, 0}});
  TargetModel m = bayesian_network_to_target(std::move(vars), cpts);
  for (const Table& f : m.factors)
    for (double v : f.values()) {
      CHECK(std::isfinite(v));
      CHECK(v <= 0.0);
    }
}

TEST_CASE("network constructor rejects cycles and bad rows") {
  std::vector<Variable> vars{{0, "a", 2}, {1, "b", 2}};
  CHECK_THROWS_AS(bayesian_network_to_target(
                      vars, {{0, {1}, {0.5, 0.5, 0.5, 0.5}},
                             {1, {0}, {0.5, 0.5, 0.5, 0.5}}}),
                  ValidationError);
  CHECK_THROWS_AS(bayesian_network_to_target(
                      vars, {{0, {}, {0.6, 0.5}}, {1, {}, {0.5, 0.5}}}),
                  ValidationError);
  CHECK_THROWS_AS(
      bayesian_network_to_target(vars, {{0, {}, {1.0}}, {1, {}, {0.5, 0.5}}}),
      ValidationError);
  CHECK_THROWS_AS(bayesian_network_to_target(vars, {{0, {}, {0.5, 0.5}}}),
                  ValidationError);
}

TEST_CASE("evidence absorption equals conditioning by enumeration") {
  TargetModel m = testing::asia_model();
  EvidenceResult r = absorb_evidence(m, {{2, 1}});  // smoke = yes
  REQUIRE(r.model.variables.size() == 7);
  CHECK(r.old_to_new[2] == -1);
  CHECK(r.new_to_old[0] == 0);
  validate_model(r.model);

  EnumerationResult before = enumerate_joint(m);
  EnumerationResult after = enumerate_joint(r.model);
  // Condition the original joint on smoke=1 and compare state-by-state.
  Table cond = slice(before.log_joint, {{2, 1}});
  log_normalize(cond);
  REQUIRE(cond.size() == after.log_joint.size());
  for (std::size_t i = 0; i < cond.size(); ++i)
    CHECK(after.log_joint[i] == doctest::Approx(cond[i]).epsilon(1e-12));

  // log_z of the absorbed model recovers log P(evidence).
  Table smoke = exp_table(log_marginal(before.log_joint, Cluster{2}));
  CHECK(std::exp(after.log_z) == doctest::Approx(smoke[1]).epsilon(1e-10));
}

TEST_CASE("empty evidence is the identity") {
  TargetModel m = testing::fork_model();
  EvidenceResult r = absorb_evidence(m, {});
  REQUIRE(r.model.factors.size() == m.factors.size());
  for (std::size_t f = 0; f < m.factors.size(); ++f) {
    CHECK(r.model.factors[f].scope() == m.factors[f].scope());
    CHECK(r.model.factors[f].values() == m.factors[f].values());
  }
}

TEST_CASE("full conditioning leaves the joint score of that assignment") {
  TargetModel m = testing::fork_model();
  Assignment x{{1, 0, 1}};
  EvidenceResult r = absorb_evidence(m, {{0, 1}, {1, 0}, {2, 1}});
  CHECK(r.model.variables.empty());
  double total = 0.0;
  for (const Table& f : r.model.factors) {
    REQUIRE(f.size() == 1);
    total += f[0];
  }
  CHECK(total == doctest::Approx(unnormalized_log_score(m, x)).epsilon(1e-12));
}

TEST_CASE("evidence errors") {
  TargetModel m = testing::fork_model();
  CHECK_THROWS_AS(absorb_evidence(m, {{5, 0}}), ValidationError);
  CHECK_THROWS_AS(absorb_evidence(m, {{1, 2}}), ValidationError);
}

TEST_CASE("scores normalize over the full state space") {
  Rng rng(99);
  TargetModel m = random_pairwise_model(rng, 5, 0.7, 1.2, 0.8);
  double lse = -1e300;
  for (int s = 0; s < 32; ++s) {
    Assignment x{{s & 1, (s >> 1) & 1, (s >> 2) & 1, (s >> 3) & 1,
                  (s >> 4) & 1}};
    lse = log_add(lse, unnormalized_log_score(m, x));
  }
  double total = 0.0;
  for (int s = 0; s < 32; ++s) {
    Assignment x{{s & 1, (s >> 1) & 1, (s >> 2) & 1, (s >> 3) & 1,
                  (s >> 4) & 1}};
    total += std::exp(unnormalized_log_score(m, x) - lse);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validator catches the broken invariants") {
  TargetModel m;
  m.variables = {{0, "a", 2}, {1, "b", 2}};
  m.factors.push_back(Table(Cluster{0}, {2}, {0.0, 0.1}));
  CHECK_THROWS_AS(validate_model(m), ValidationError);  // b uncovered
  m.factors.push_back(Table(Cluster{1}, {3}, {0.0, 0.1, 0.2}));
  CHECK_THROWS_AS(validate_model(m), ValidationError);  // cardinality mismatch
  m.factors[1] = Table(Cluster{1}, {2}, {0.0, 0.1});
  validate_model(m);
  m.variables[1].cardinality = 1;
  CHECK_THROWS_AS(validate_model(m), ValidationError);
}
