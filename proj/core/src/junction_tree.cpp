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

#include "structmf/junction_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "structmf/elimination.hpp"

namespace structmf {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

}  // namespace

TreeStructure tree_structure_from_clusters(const std::vector<Cluster>& clusters,
                                           int n_vars, int width_limit) {
  Triangulation tri = triangulate(clusters, n_vars);
  if (tri.order.induced_width > width_limit)
    throw TractabilityError("cluster structure is too wide",
                            tri.order.induced_width, width_limit);

  TreeStructure t;
  t.nodes = tri.cliques;
  const int m = static_cast<int>(t.nodes.size());

  // Maximum-weight spanning tree over separator sizes; zero-weight links join
  // independent components through empty separators. Candidate order makes
  // the result deterministic.
  struct Candidate {
    int weight;
    int a;
    int b;
  };
  std::vector<Candidate> candidates;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      Cluster sep = set_intersection(t.nodes[static_cast<std::size_t>(a)],
                                     t.nodes[static_cast<std::size_t>(b)]);
      candidates.push_back({static_cast<int>(sep.size()), a, b});
    }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) {
                     if (x.weight != y.weight) return x.weight > y.weight;
                     if (x.a != y.a) return x.a < y.a;
                     return x.b < y.b;
                   });
  UnionFind uf(m);
  for (const Candidate& c : candidates)
    if (uf.merge(c.a, c.b)) t.edges.emplace_back(c.a, c.b);

  validate_tree_structure(t, n_vars);
  return t;
}

void validate_tree_structure(const TreeStructure& t, int n_vars) {
  const int m = static_cast<int>(t.nodes.size());
  if (m == 0) throw ValidationError("tree has no nodes");
  std::vector<bool> covered(static_cast<std::size_t>(n_vars), false);
  for (const Cluster& c : t.nodes)
    for (int v : c.ids()) {
      if (v >= n_vars)
        throw ValidationError("tree node references unknown variable " +
                              std::to_string(v));
      covered[static_cast<std::size_t>(v)] = true;
    }
  for (int v = 0; v < n_vars; ++v)
    if (!covered[static_cast<std::size_t>(v)])
      throw ValidationError("variable " + std::to_string(v) +
                            " missing from every tree node");

  if (static_cast<int>(t.edges.size()) != m - 1)
    throw ValidationError("tree must have exactly " + std::to_string(m - 1) +
                          " edges, got " + std::to_string(t.edges.size()));
  UnionFind uf(m);
  for (auto [a, b] : t.edges) {
    if (a < 0 || a >= m || b < 0 || b >= m || a == b)
      throw ValidationError("tree edge endpoints out of range");
    if (!uf.merge(a, b)) throw ValidationError("tree edges contain a cycle");
  }

  // Running intersection property: the nodes holding any given variable form
  // a connected subtree.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  for (auto [a, b] : t.edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (int v = 0; v < n_vars; ++v) {
    std::vector<bool> holds(static_cast<std::size_t>(m), false);
    int count = 0;
    int start = -1;
    for (int i = 0; i < m; ++i)
      if (t.nodes[static_cast<std::size_t>(i)].contains(v)) {
        holds[static_cast<std::size_t>(i)] = true;
        ++count;
        start = i;
      }
    if (count <= 1) continue;
    std::vector<int> stack{start};
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    seen[static_cast<std::size_t>(start)] = true;
    int reached = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int j : adj[static_cast<std::size_t>(i)]) {
        if (seen[static_cast<std::size_t>(j)] ||
            !holds[static_cast<std::size_t>(j)])
          continue;
        seen[static_cast<std::size_t>(j)] = true;
        ++reached;
        stack.push_back(j);
      }
    }
    if (reached != count)
      throw ValidationError(
          "running intersection property violated for variable " +
          std::to_string(v));
  }
}

CompiledTree compile_tree(TreeStructure structure, const CardinalityMap& card,
                          std::span<const Table> factors) {
  validate_tree_structure(structure, static_cast<int>(card.size()));

  CompiledTree t;
  t.structure_ = std::move(structure);
  t.card_ = card;
  const int m = t.num_nodes();

  for (auto [a, b] : t.structure_.edges)
    t.separators_.push_back(
        set_intersection(t.structure_.nodes[static_cast<std::size_t>(a)],
                         t.structure_.nodes[static_cast<std::size_t>(b)]));

  std::vector<std::vector<std::pair<int, int>>> adj(
      static_cast<std::size_t>(m));  // (neighbor, edge index)
  for (std::size_t e = 0; e < t.structure_.edges.size(); ++e) {
    auto [a, b] = t.structure_.edges[e];
    adj[static_cast<std::size_t>(a)].emplace_back(b, static_cast<int>(e));
    adj[static_cast<std::size_t>(b)].emplace_back(a, static_cast<int>(e));
  }
  t.parent_edge_.assign(static_cast<std::size_t>(m), -1);
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  seen[0] = true;
  t.visit_order_.push_back(0);
  for (std::size_t head = 0; head < t.visit_order_.size(); ++head) {
    int u = t.visit_order_[head];
    for (auto [v, e] : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = true;
      t.parent_edge_[static_cast<std::size_t>(v)] = e;
      t.visit_order_.push_back(v);
    }
  }

  t.input_factors_.assign(factors.begin(), factors.end());
  for (std::size_t f = 0; f < t.input_factors_.size(); ++f) {
    int node = t.node_containing(t.input_factors_[f].scope());
    if (node < 0)
      throw ValidationError("factor " + std::to_string(f) +
                            " fits in no tree node");
    t.factor_node_.push_back(node);
  }

  t.pour_and_calibrate();
  return t;
}

CompiledTree compile_junction_tree(const std::vector<Cluster>& clusters,
                                   std::span<const Table> factors,
                                   const CardinalityMap& card,
                                   int width_limit) {
  std::vector<Cluster> all = clusters;
  for (const Table& f : factors) all.push_back(f.scope());
  TreeStructure structure =
      tree_structure_from_clusters(all, static_cast<int>(card.size()),
                                   width_limit);
  return compile_tree(std::move(structure), card, factors);
}

CompiledTree compile_model_tree(const TargetModel& model, int width_limit) {
  std::vector<Cluster> scopes;
  scopes.reserve(model.factors.size());
  for (const Table& f : model.factors) scopes.push_back(f.scope());
  // Isolated-by-factor variables are covered by construction (model
  // invariant), so the scopes alone determine the graph.
  TreeStructure structure = tree_structure_from_clusters(
      scopes, static_cast<int>(model.variables.size()), width_limit);
  return compile_tree(std::move(structure), model.cardinalities(),
                      model.factors);
}

int CompiledTree::node_containing(const Cluster& c) const {
  for (int i = 0; i < num_nodes(); ++i)
    if (structure_.nodes[static_cast<std::size_t>(i)].contains(c)) return i;
  return -1;
}

void CompiledTree::pour_and_calibrate() {
  pots_.clear();
  sep_pots_.clear();
  for (const Cluster& c : structure_.nodes) pots_.push_back(make_table(c, card_));
  for (const Cluster& s : separators_) sep_pots_.push_back(make_table(s, card_));
  for (std::size_t f = 0; f < input_factors_.size(); ++f)
    add_projected(pots_[static_cast<std::size_t>(factor_node_[f])],
                  input_factors_[f]);
  calibrated_ = false;
  calibrate();
}

void CompiledTree::calibrate() {
  // Hugin in log space. Collect toward node 0, then distribute outward; the
  // invariant (sum of node pots) - (sum of sep pots) = joint holds after
  // every message.
  auto pass = [&](int child, int parent_side) {
    int e = parent_edge_[static_cast<std::size_t>(child)];
    auto [a, b] = structure_.edges[static_cast<std::size_t>(e)];
    int parent = a == child ? b : a;
    int from = parent_side ? parent : child;
    int to = parent_side ? child : parent;
    Table new_sep = log_marginal(pots_[static_cast<std::size_t>(from)],
                                 separators_[static_cast<std::size_t>(e)]);
    Table delta = new_sep;
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] -= sep_pots_[static_cast<std::size_t>(e)][i];
    add_projected(pots_[static_cast<std::size_t>(to)], delta);
    sep_pots_[static_cast<std::size_t>(e)] = std::move(new_sep);
  };
  for (std::size_t i = visit_order_.size(); i-- > 1;)
    pass(visit_order_[i], 0);
  for (std::size_t i = 1; i < visit_order_.size(); ++i)
    pass(visit_order_[i], 1);
  log_z_ = logsumexp(pots_[0]);
  calibrated_ = true;
}

Table CompiledTree::log_marginal_over(const Cluster& target) const {
  int node = node_containing(target);
  Table t = node >= 0
                ? log_marginal(pots_[static_cast<std::size_t>(node)], target)
                : ve_log_marginal(input_factors_, card_, target);
  log_normalize(t);
  return t;
}

Table CompiledTree::marginal(const Cluster& target) const {
  return exp_table(log_marginal_over(target));
}

double CompiledTree::entropy() const {
  double h = 0.0;
  for (const Table& pot : pots_) {
    Table p = pot;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= log_z_;
    h += entropy_nats(exp_table(p));
  }
  for (const Table& pot : sep_pots_) {
    Table p = pot;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= log_z_;
    h -= entropy_nats(exp_table(p));
  }
  return h;
}

double CompiledTree::expectation(const Table& f) const {
  if (f.scope().empty()) return f[0];
  Table p = marginal(f.scope());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * f[i];
  return s;
}

Table CompiledTree::conditional_expectation(const Table& f,
                                            const Cluster& given) const {
  Cluster u = set_union(f.scope(), given);
  Table log_joint = log_marginal_over(u);
  Table out = make_table(given, card_);
  std::vector<std::size_t> f_strides = projection_strides(log_joint, f);
  std::vector<std::size_t> g_strides = projection_strides(log_joint, out);

  // The weights are normalized slice by slice in log space. Dividing plain
  // exp() sums instead would underflow on slices the current potentials have
  // driven to tiny probability, and anything but the true conditional there
  // can resurrect states the target forbids.
  std::vector<std::size_t> f_index(log_joint.size());
  std::vector<std::size_t> g_index(log_joint.size());
  std::vector<int> state(u.size(), 0);
  for (std::size_t flat = 0; flat < log_joint.size(); ++flat) {
    log_joint.decode(flat, state);
    std::size_t fi = 0;
    std::size_t gi = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      fi += static_cast<std::size_t>(state[i]) * f_strides[i];
      gi += static_cast<std::size_t>(state[i]) * g_strides[i];
    }
    f_index[flat] = fi;
    g_index[flat] = gi;
  }

  const double ninf = -std::numeric_limits<double>::infinity();
  Table peak = make_table(given, card_);
  for (double& v : peak.values()) v = ninf;
  for (std::size_t flat = 0; flat < log_joint.size(); ++flat)
    peak[g_index[flat]] = std::max(peak[g_index[flat]], log_joint[flat]);

  Table norm = make_table(given, card_);
  double total = 0.0;
  for (std::size_t flat = 0; flat < log_joint.size(); ++flat) {
    if (peak[g_index[flat]] == ninf) continue;
    norm[g_index[flat]] += std::exp(log_joint[flat] - peak[g_index[flat]]);
    total += std::exp(log_joint[flat]) * f[f_index[flat]];
  }
  for (std::size_t flat = 0; flat < log_joint.size(); ++flat) {
    std::size_t gi = g_index[flat];
    if (peak[gi] == ninf) continue;
    double w = std::exp(log_joint[flat] - peak[gi]) / norm[gi];
    out[gi] += w * f[f_index[flat]];
  }
  // A slice with no representable mass at all contributes nothing to the
  // objective; fall back to the unconditional average there.
  for (std::size_t i = 0; i < out.size(); ++i)
    if (peak[i] == ninf) out[i] = total;
  return out;
}

CompiledTree CompiledTree::reweighted(std::span<const Table> extra) const {
  std::vector<Table> factors = input_factors_;
  factors.insert(factors.end(), extra.begin(), extra.end());
  return with_factors(factors);
}

CompiledTree CompiledTree::with_factors(std::span<const Table> factors) const {
  CompiledTree t;
  t.structure_ = structure_;
  t.separators_ = separators_;
  t.card_ = card_;
  t.visit_order_ = visit_order_;
  t.parent_edge_ = parent_edge_;
  t.input_factors_.assign(factors.begin(), factors.end());
  for (std::size_t f = 0; f < t.input_factors_.size(); ++f) {
    int node = t.node_containing(t.input_factors_[f].scope());
    if (node < 0)
      throw ValidationError("factor " + std::to_string(f) +
                            " fits in no tree node");
    t.factor_node_.push_back(node);
  }
  t.pour_and_calibrate();
  return t;
}

double free_energy(const CompiledTree& q, const TargetModel& p) {
  double mean_log_p = 0.0;
  for (const Table& f : p.factors) mean_log_p += q.expectation(f);
  return -q.entropy() - mean_log_p;
}

double kl_divergence(const CompiledTree& q, const TargetModel& p, KlMode mode) {
  double fe = free_energy(q, p);
  if (mode == KlMode::kFreeEnergy) return fe;
  double log_z_p =
      p.log_z.has_value() ? *p.log_z : compile_model_tree(p).log_z();
  return fe + log_z_p;
}

}  // namespace structmf
