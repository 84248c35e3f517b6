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

#include "structmf/directed_mf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "structmf/errors.hpp"
#include "structmf/rng.hpp"

namespace structmf {

namespace {

// Residual state count of cluster g, for the uniform initialization.
double log_residual_states(const Cluster& residual, const CardinalityMap& card) {
  double s = 0.0;
  for (int v : residual.ids()) s += std::log(static_cast<double>(card[static_cast<std::size_t>(v)]));
  return s;
}

std::vector<int> sweep_order(const Schedule& s, int m, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  switch (s.kind) {
    case Schedule::Kind::kSequential:
      break;
    case Schedule::Kind::kReverse:
      std::reverse(order.begin(), order.end());
      break;
    case Schedule::Kind::kRandom:
      rng.shuffle(order);
      break;
  }
  return order;
}

}  // namespace

SeparatorSplit derive_separators(const std::vector<Cluster>& clusters) {
  if (clusters.empty())
    throw ValidationError("approximation needs at least one cluster");
  SeparatorSplit split;
  Cluster seen;
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    if (clusters[g].empty())
      throw ValidationError("empty cluster in approximation");
    Cluster s = set_intersection(clusters[g], seen);
    Cluster r = set_difference(clusters[g], s);
    if (r.empty())
      throw ValidationError("cluster " + std::to_string(g) +
                            " adds no new variables");
    split.separators.push_back(std::move(s));
    split.residuals.push_back(std::move(r));
    seen = set_union(seen, clusters[g]);
  }
  return split;
}

DirectedApprox make_directed_approx(const TargetModel& p,
                                    std::vector<Cluster> clusters,
                                    int width_limit) {
  validate_model(p);
  int n = static_cast<int>(p.variables.size());
  for (const Cluster& c : clusters)
    if (!c.empty() && c.ids().back() >= n)
      throw ValidationError("cluster variable " + std::to_string(c.ids().back()) +
                            " out of range");

  DirectedApprox q;
  q.card = p.cardinalities();
  q.clusters = std::move(clusters);
  SeparatorSplit split = derive_separators(q.clusters);
  q.separators = std::move(split.separators);
  q.residuals = std::move(split.residuals);

  Cluster covered;
  for (const Cluster& c : q.clusters) covered = set_union(covered, c);
  if (static_cast<int>(covered.size()) != n)
    throw ValidationError("cluster scopes leave variables uncovered");

  q.support = tree_structure_from_clusters(q.clusters, n, width_limit);
  for (std::size_t g = 0; g < q.clusters.size(); ++g) {
    Table t = make_table(q.clusters[g], q.card);
    double lu = -log_residual_states(q.residuals[g], q.card);
    for (double& v : t.values()) v = lu;
    q.conditionals.push_back(std::move(t));
  }
  rebuild_q_tree(q);
  return q;
}

void rebuild_q_tree(DirectedApprox& q) {
  q.q_tree = compile_tree(q.support, q.card, q.conditionals);
}

void directed_mf_update(DirectedApprox& q, const TargetModel& p, int gamma) {
  const Cluster& cg = q.clusters[static_cast<std::size_t>(gamma)];
  Table acc = make_table(cg, q.card);
  for (const Table& f : p.factors)
    add_projected(acc, q.q_tree.conditional_expectation(f, cg), 1);
  for (std::size_t b = 0; b < q.conditionals.size(); ++b) {
    if (static_cast<int>(b) == gamma) continue;
    add_projected(acc, q.q_tree.conditional_expectation(q.conditionals[b], cg),
                  -1);
  }
  // Renormalize over the residual at every separator state; any constant in
  // the accumulated average cancels here exactly.
  Table z = log_marginal(acc, q.separators[static_cast<std::size_t>(gamma)]);
  add_projected(acc, z, -1);
  q.conditionals[static_cast<std::size_t>(gamma)] = std::move(acc);
  rebuild_q_tree(q);
}

DescentReport directed_optimize(DirectedApprox& q, const TargetModel& p,
                                const OptimizeOptions& opts) {
  DescentReport rep;
  int m = static_cast<int>(q.clusters.size());
  Rng rng(opts.schedule.seed);
  rep.fe_trace.push_back(free_energy(q.q_tree, p));
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double sup = 0.0;
    for (int gamma : sweep_order(opts.schedule, m, rng)) {
      Table before = q.conditionals[static_cast<std::size_t>(gamma)];
      directed_mf_update(q, p, gamma);
      const Table& after = q.conditionals[static_cast<std::size_t>(gamma)];
      for (std::size_t i = 0; i < after.size(); ++i)
        sup = std::max(sup, std::abs(after[i] - before[i]));
      rep.fe_trace.push_back(free_energy(q.q_tree, p));
      ++rep.updates;
    }
    rep.sweeps = sweep + 1;
    rep.final_sup_change = sup;
    if (sup <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

void init_from_distribution(DirectedApprox& q, const CompiledTree& src) {
  for (std::size_t g = 0; g < q.clusters.size(); ++g) {
    Table phi = make_table(q.clusters[g], q.card);
    add_projected(phi, src.log_marginal_over(q.clusters[g]), 1);
    add_projected(phi, src.log_marginal_over(q.separators[g]), -1);
    q.conditionals[g] = std::move(phi);
  }
  rebuild_q_tree(q);
}

double local_normalization_defect(const DirectedApprox& q) {
  double worst = 0.0;
  for (std::size_t g = 0; g < q.conditionals.size(); ++g) {
    Table z = log_marginal(q.conditionals[g], q.separators[g]);
    for (double v : z.values()) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace structmf
