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

#include "structmf/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "structmf/errors.hpp"
#include "structmf/rng.hpp"

namespace structmf {

namespace {

// Scopes whose pairwise intersections define Q's dependence structure:
// the adjustable clusters first, then the copied factor scopes.
std::vector<Cluster> support_scopes(const UndirectedApprox& q) {
  std::vector<Cluster> scopes = q.clusters;
  for (const Table& t : q.copied) scopes.push_back(t.scope());
  return scopes;
}

// Union of all scopes sharing a connected component with scopes[seed] in the
// intersection graph. Variables outside the result are independent of it
// under Q.
Cluster component_of(const std::vector<Cluster>& scopes, std::size_t seed) {
  std::vector<bool> in(scopes.size(), false);
  in[seed] = true;
  Cluster vars = scopes[seed];
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < scopes.size(); ++i) {
      if (in[i] || !scopes[i].intersects(vars)) continue;
      in[i] = true;
      vars = set_union(vars, scopes[i]);
      grew = true;
    }
  }
  return vars;
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

UndirectedApprox make_undirected_approx(const TargetModel& p,
                                        std::vector<Cluster> clusters,
                                        std::vector<int> copied_factors,
                                        int width_limit) {
  validate_model(p);
  if (clusters.empty())
    throw ValidationError("approximation needs at least one cluster");
  int n = static_cast<int>(p.variables.size());
  for (const Cluster& c : clusters) {
    if (c.empty()) throw ValidationError("empty cluster in approximation");
    if (c.ids().back() >= n)
      throw ValidationError("cluster variable " + std::to_string(c.ids().back()) +
                            " out of range");
  }
  std::set<int> seen;
  for (int idx : copied_factors) {
    if (idx < 0 || idx >= static_cast<int>(p.factors.size()))
      throw ValidationError("copied factor index " + std::to_string(idx) +
                            " out of range");
    if (!seen.insert(idx).second)
      throw ValidationError("factor " + std::to_string(idx) + " copied twice");
  }

  UndirectedApprox q;
  q.card = p.cardinalities();
  q.clusters = std::move(clusters);
  q.copied_source = std::move(copied_factors);
  for (int idx : q.copied_source)
    q.copied.push_back(p.factors[static_cast<std::size_t>(idx)]);

  Cluster covered;
  for (const Cluster& c : support_scopes(q)) covered = set_union(covered, c);
  if (static_cast<int>(covered.size()) != n)
    throw ValidationError("cluster scopes leave variables uncovered");

  q.support = tree_structure_from_clusters(support_scopes(q), n, width_limit);
  for (const Cluster& c : q.clusters)
    q.variational.push_back(make_table(c, q.card));
  rebuild_q_tree(q);
  return q;
}

void rebuild_q_tree(UndirectedApprox& q) {
  std::vector<Table> factors = q.variational;
  factors.insert(factors.end(), q.copied.begin(), q.copied.end());
  q.q_tree = compile_tree(q.support, q.card, factors);
}

void seed_variational(UndirectedApprox& q, std::uint64_t seed,
                      double amplitude) {
  Rng rng(seed);
  for (Table& t : q.variational)
    for (double& v : t.values()) v = rng.uniform(-amplitude, amplitude);
  rebuild_q_tree(q);
}

DependencySets dependency_sets(const UndirectedApprox& q, const TargetModel& p,
                               int gamma) {
  std::vector<Cluster> scopes = support_scopes(q);
  Cluster vars = component_of(scopes, static_cast<std::size_t>(gamma));

  DependencySets sets;
  std::set<int> copied(q.copied_source.begin(), q.copied_source.end());
  for (std::size_t a = 0; a < p.factors.size(); ++a) {
    if (copied.count(static_cast<int>(a))) continue;
    if (p.factors[a].scope().intersects(vars))
      sets.target_factors.push_back(static_cast<int>(a));
  }
  for (std::size_t b = 0; b < q.clusters.size(); ++b) {
    if (static_cast<int>(b) == gamma) continue;
    if (q.clusters[b].intersects(vars))
      sets.other_clusters.push_back(static_cast<int>(b));
  }
  return sets;
}

void mf_update(UndirectedApprox& q, const TargetModel& p, int gamma) {
  mf_update_with_sets(q, p, gamma, dependency_sets(q, p, gamma));
}

void mf_update_with_sets(UndirectedApprox& q, const TargetModel& p, int gamma,
                         const DependencySets& sets) {
  const Cluster& cg = q.clusters[static_cast<std::size_t>(gamma)];
  Table acc = make_table(cg, q.card);
  for (int a : sets.target_factors)
    add_projected(
        acc,
        q.q_tree.conditional_expectation(p.factors[static_cast<std::size_t>(a)],
                                         cg),
        1);
  for (int b : sets.other_clusters)
    add_projected(acc,
                  q.q_tree.conditional_expectation(
                      q.variational[static_cast<std::size_t>(b)], cg),
                  -1);
  max_normalize(acc);
  q.variational[static_cast<std::size_t>(gamma)] = std::move(acc);
  rebuild_q_tree(q);
}

DescentReport optimize(UndirectedApprox& q, const TargetModel& p,
                       const OptimizeOptions& opts) {
  DescentReport rep;
  int m = static_cast<int>(q.clusters.size());
  Rng rng(opts.schedule.seed);
  rep.fe_trace.push_back(free_energy(q.q_tree, p));
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double sup = 0.0;
    for (int gamma : sweep_order(opts.schedule, m, rng)) {
      Table before = q.variational[static_cast<std::size_t>(gamma)];
      mf_update(q, p, gamma);
      const Table& after = q.variational[static_cast<std::size_t>(gamma)];
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

double factorization_gap(const CompiledTree& q, const Cluster& cluster,
                         const std::vector<Cluster>& blocks) {
  Cluster covered;
  std::size_t total = 0;
  for (const Cluster& b : blocks) {
    if (b.empty()) throw ValidationError("empty block");
    if (covered.intersects(b)) throw ValidationError("blocks overlap");
    covered = set_union(covered, b);
    total += b.size();
  }
  if (!(covered == cluster) || total != cluster.size())
    throw ValidationError("blocks do not partition the cluster");

  double gap = -entropy_nats(q.marginal(cluster));
  for (const Cluster& b : blocks) gap += entropy_nats(q.marginal(b));
  return gap;
}

void init_from_distribution(UndirectedApprox& q, const CompiledTree& src) {
  Cluster seen;
  for (std::size_t g = 0; g < q.clusters.size(); ++g) {
    const Cluster& c = q.clusters[g];
    Table phi = make_table(c, q.card);
    add_projected(phi, src.log_marginal_over(c), 1);
    Cluster overlap = set_intersection(c, seen);
    add_projected(phi, src.log_marginal_over(overlap), -1);
    max_normalize(phi);
    q.variational[g] = std::move(phi);
    seen = set_union(seen, c);
  }
  rebuild_q_tree(q);
}

}  // namespace structmf
