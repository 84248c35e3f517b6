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

#include "structmf/jt_approx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "structmf/errors.hpp"
#include "structmf/rng.hpp"

namespace structmf {

namespace {

// node[i] *= num/den at the matching separator state. A zero denominator
// with zero numerator zeroes the entry (the receiver already has no mass
// there when the tree is consistent); with a positive numerator it would
// create mass out of nothing and is rejected.
void scale_by_separator_ratio(Table& node, const Table& num, const Table& den) {
  const Cluster& ns = node.scope();
  const Cluster& ss = num.scope();
  std::vector<std::size_t> pos;
  for (int v : ss.ids()) pos.push_back(static_cast<std::size_t>(ns.index_of(v)));
  std::vector<int> st(ns.size());
  std::vector<int> sub(ss.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    node.decode(i, st);
    for (std::size_t k = 0; k < pos.size(); ++k) sub[k] = st[pos[k]];
    std::size_t j = num.flat_index(sub);
    double d = den[j];
    if (d == 0.0) {
      if (num[j] == 0.0) {
        node[i] = 0.0;
        continue;
      }
      throw ValidationError("update grew support across a zero separator");
    }
    node[i] *= num[j] / d;
  }
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

Table uniform_probability(const Cluster& scope, const CardinalityMap& card) {
  Table t = make_table(scope, card);
  double u = 1.0 / static_cast<double>(t.size());
  for (double& v : t.values()) v = u;
  return t;
}

}  // namespace

namespace {

JunctionTreeApprox uniform_over_structure(const TargetModel& p,
                                          TreeStructure structure) {
  JunctionTreeApprox q;
  q.card = p.cardinalities();
  q.structure = std::move(structure);
  for (auto [a, b] : q.structure.edges)
    q.separators.push_back(
        set_intersection(q.structure.nodes[static_cast<std::size_t>(a)],
                         q.structure.nodes[static_cast<std::size_t>(b)]));
  for (const Cluster& c : q.structure.nodes)
    q.node_potentials.push_back(uniform_probability(c, q.card));
  for (const Cluster& s : q.separators)
    q.separator_potentials.push_back(uniform_probability(s, q.card));
  return q;
}

}  // namespace

JunctionTreeApprox make_jt_approx(const TargetModel& p,
                                  const std::vector<Cluster>& clusters,
                                  int width_limit) {
  validate_model(p);
  int n = static_cast<int>(p.variables.size());
  return uniform_over_structure(
      p, tree_structure_from_clusters(clusters, n, width_limit));
}

JunctionTreeApprox make_jt_approx(const TargetModel& p,
                                  const TreeStructure& structure) {
  validate_model(p);
  validate_tree_structure(structure, static_cast<int>(p.variables.size()));
  return uniform_over_structure(p, structure);
}

JunctionTreeApprox jt_from_calibrated(const CompiledTree& src) {
  JunctionTreeApprox q;
  q.structure = src.structure();
  q.card = src.cardinalities();
  for (int e = 0; e < src.num_edges(); ++e)
    q.separators.push_back(src.separator(e));
  for (int i = 0; i < src.num_nodes(); ++i) {
    Table t = src.node_potential(i);
    for (double& v : t.values()) v = std::exp(v - src.log_z());
    q.node_potentials.push_back(std::move(t));
  }
  for (int e = 0; e < src.num_edges(); ++e) {
    Table t = src.separator_potential(e);
    for (double& v : t.values()) v = std::exp(v - src.log_z());
    q.separator_potentials.push_back(std::move(t));
  }
  return q;
}

CompiledTree to_compiled_tree(const JunctionTreeApprox& q) {
  std::vector<Table> factors;
  for (const Table& t : q.node_potentials) factors.push_back(log_table(t));
  for (const Table& t : q.separator_potentials) {
    Table lt = log_table(t);
    for (double& v : lt.values()) v = -v;
    factors.push_back(std::move(lt));
  }
  return compile_tree(q.structure, q.card, factors);
}

void jt_mf_update(JunctionTreeApprox& q, const TargetModel& p, int gamma) {
  CompiledTree qt = to_compiled_tree(q);
  const Cluster& cg = q.structure.nodes[static_cast<std::size_t>(gamma)];
  Table acc = make_table(cg, q.card);
  for (const Table& f : p.factors)
    add_projected(acc, qt.conditional_expectation(f, cg), 1);
  for (std::size_t b = 0; b < q.node_potentials.size(); ++b) {
    if (static_cast<int>(b) == gamma) continue;
    add_projected(
        acc, qt.conditional_expectation(log_table(q.node_potentials[b]), cg),
        -1);
  }
  for (const Table& s : q.separator_potentials)
    add_projected(acc, qt.conditional_expectation(log_table(s), cg), 1);

  // The rest of the tree, divided by the old potential here, is the
  // conditional Q(.|c_gamma) and carries unit mass at every state, so
  // normalizing the new potential to total one keeps Q itself normalized.
  max_normalize(acc);
  Table pot = exp_table(acc);
  double total = 0.0;
  for (double v : pot.values()) total += v;
  for (double& v : pot.values()) v /= total;
  q.node_potentials[static_cast<std::size_t>(gamma)] = std::move(pot);
  distribute_evidence(q, gamma);
}

void distribute_evidence(JunctionTreeApprox& q, int kappa) {
  int n = static_cast<int>(q.structure.nodes.size());
  if (kappa < 0 || kappa >= n)
    throw ValidationError("node index out of range");
  std::vector<std::vector<std::pair<int, int>>> adj(
      static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < q.structure.edges.size(); ++e) {
    auto [a, b] = q.structure.edges[e];
    adj[static_cast<std::size_t>(a)].push_back({b, static_cast<int>(e)});
    adj[static_cast<std::size_t>(b)].push_back({a, static_cast<int>(e)});
  }
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  std::vector<int> frontier{kappa};
  done[static_cast<std::size_t>(kappa)] = true;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier)
      for (auto [v, e] : adj[static_cast<std::size_t>(u)]) {
        if (done[static_cast<std::size_t>(v)]) continue;
        Table new_sep =
            sum_marginal(q.node_potentials[static_cast<std::size_t>(u)],
                         q.separators[static_cast<std::size_t>(e)]);
        scale_by_separator_ratio(
            q.node_potentials[static_cast<std::size_t>(v)], new_sep,
            q.separator_potentials[static_cast<std::size_t>(e)]);
        q.separator_potentials[static_cast<std::size_t>(e)] =
            std::move(new_sep);
        done[static_cast<std::size_t>(v)] = true;
        next.push_back(v);
      }
    frontier = std::move(next);
  }
}

double consistency_defect(const JunctionTreeApprox& q) {
  double worst = 0.0;
  for (std::size_t e = 0; e < q.separators.size(); ++e) {
    auto [a, b] = q.structure.edges[e];
    for (int side : {a, b}) {
      Table m = sum_marginal(q.node_potentials[static_cast<std::size_t>(side)],
                             q.separators[e]);
      for (std::size_t i = 0; i < m.size(); ++i)
        worst = std::max(worst,
                         std::abs(m[i] - q.separator_potentials[e][i]));
    }
  }
  return worst;
}

const Table& cluster_marginal(const JunctionTreeApprox& q, int gamma) {
  return q.node_potentials[static_cast<std::size_t>(gamma)];
}

DescentReport jt_optimize(JunctionTreeApprox& q, const TargetModel& p,
                          const OptimizeOptions& opts) {
  DescentReport rep;
  int m = static_cast<int>(q.structure.nodes.size());
  Rng rng(opts.schedule.seed);
  rep.fe_trace.push_back(free_energy(to_compiled_tree(q), p));
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double sup = 0.0;
    for (int gamma : sweep_order(opts.schedule, m, rng)) {
      std::vector<Table> before = q.node_potentials;
      jt_mf_update(q, p, gamma);
      for (std::size_t i = 0; i < before.size(); ++i)
        for (std::size_t s = 0; s < before[i].size(); ++s)
          sup = std::max(sup,
                         std::abs(q.node_potentials[i][s] - before[i][s]));
      rep.fe_trace.push_back(free_energy(to_compiled_tree(q), p));
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

}  // namespace structmf
