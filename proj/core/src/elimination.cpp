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

#include "structmf/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace structmf {

namespace {

// Dense symmetric adjacency; n is small wherever elimination runs.
class Graph {
 public:
  explicit Graph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, false) {}

  void connect(int a, int b) {
    if (a == b) return;
    adj_[idx(a, b)] = true;
    adj_[idx(b, a)] = true;
  }
  bool connected(int a, int b) const { return adj_[idx(a, b)]; }

  void add_clique(const Cluster& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) connect(c[i], c[j]);
  }

  std::vector<int> neighbors_among(int v, const std::vector<bool>& alive) const {
    std::vector<int> out;
    for (int u = 0; u < n_; ++u)
      if (u != v && alive[static_cast<std::size_t>(u)] && connected(v, u))
        out.push_back(u);
    return out;
  }

  int fill_count(const std::vector<int>& nbrs) const {
    int fill = 0;
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        if (!connected(nbrs[i], nbrs[j])) ++fill;
    return fill;
  }

 private:
  std::size_t idx(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(b);
  }
  int n_;
  std::vector<bool> adj_;
};

Triangulation triangulate_impl(const std::vector<Cluster>& clusters,
                               int n_vars) {
  std::vector<bool> covered(static_cast<std::size_t>(n_vars), false);
  Graph g(n_vars);
  for (const Cluster& c : clusters) {
    for (int v : c.ids()) {
      if (v >= n_vars)
        throw ValidationError("cluster references variable " +
                              std::to_string(v) + " outside 0.." +
                              std::to_string(n_vars - 1));
      covered[static_cast<std::size_t>(v)] = true;
    }
    g.add_clique(c);
  }
  for (int v = 0; v < n_vars; ++v)
    if (!covered[static_cast<std::size_t>(v)])
      throw ValidationError("variable " + std::to_string(v) +
                            " appears in no cluster");

  Triangulation result;
  std::vector<bool> alive(static_cast<std::size_t>(n_vars), true);
  for (int step = 0; step < n_vars; ++step) {
    int best = -1;
    int best_fill = 0;
    for (int v = 0; v < n_vars; ++v) {
      if (!alive[static_cast<std::size_t>(v)]) continue;
      int fill = g.fill_count(g.neighbors_among(v, alive));
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    std::vector<int> nbrs = g.neighbors_among(best, alive);
    std::vector<int> clique_ids = nbrs;
    clique_ids.push_back(best);
    Cluster clique(clique_ids);
    int width = static_cast<int>(clique.size()) - 1;
    result.order.induced_width = std::max(result.order.induced_width, width);
    result.order.order.push_back(best);
    result.cliques.push_back(std::move(clique));
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        g.connect(nbrs[i], nbrs[j]);
    alive[static_cast<std::size_t>(best)] = false;
  }

  // Keep maximal cliques only. A clique formed at step i contains the vertex
  // eliminated there, which no later clique can, so every non-maximal clique
  // is a subset of some earlier one; a forward scan finds them all.
  std::vector<Cluster> maximal;
  for (const Cluster& c : result.cliques) {
    bool dominated = false;
    for (const Cluster& kept : maximal)
      if (kept.contains(c)) {
        dominated = true;
        break;
      }
    if (!dominated) maximal.push_back(c);
  }
  result.cliques = std::move(maximal);
  return result;
}

}  // namespace

EliminationOrder build_elimination_order(const std::vector<Cluster>& clusters,
                                         int n_vars) {
  return triangulate_impl(clusters, n_vars).order;
}

Triangulation triangulate(const std::vector<Cluster>& clusters, int n_vars) {
  return triangulate_impl(clusters, n_vars);
}

Table ve_log_marginal(std::span<const Table> factors,
                      const CardinalityMap& card, const Cluster& keep) {
  std::vector<Table> pool(factors.begin(), factors.end());
  Cluster all;
  for (const Table& f : pool) all = set_union(all, f.scope());
  Cluster eliminate = set_difference(all, keep);
  if (!all.contains(keep))
    throw ValidationError("marginal target outside the factor scopes");

  // Min-fill order restricted to the eliminated variables; keep variables are
  // never removed, which is equivalent to eliminating them last.
  while (!eliminate.empty()) {
    Graph g(static_cast<int>(card.size()));
    for (const Table& f : pool) g.add_clique(f.scope());
    std::vector<bool> alive(card.size(), false);
    for (const Table& f : pool)
      for (int v : f.scope().ids()) alive[static_cast<std::size_t>(v)] = true;
    int best = -1;
    int best_fill = 0;
    for (int v : eliminate.ids()) {
      if (!alive[static_cast<std::size_t>(v)]) continue;
      int fill = g.fill_count(g.neighbors_among(v, alive));
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    if (best < 0) {
      // Remaining eliminated variables touch no factor; they contribute a
      // uniform count factor each.
      double log_states = 0.0;
      for (int v : eliminate.ids())
        log_states += std::log(static_cast<double>(card[static_cast<std::size_t>(v)]));
      pool.push_back(Table::scalar(log_states));
      break;
    }

    std::vector<Table> bucket;
    std::vector<Table> rest;
    for (Table& f : pool) {
      if (f.scope().contains(best))
        bucket.push_back(std::move(f));
      else
        rest.push_back(std::move(f));
    }
    Table product = log_product(bucket, card);
    Table reduced =
        log_marginal(product, set_difference(product.scope(), Cluster{best}));
    rest.push_back(std::move(reduced));
    pool = std::move(rest);
    eliminate = set_difference(eliminate, Cluster{best});
  }
  return log_product(pool, card);
}

}  // namespace structmf
