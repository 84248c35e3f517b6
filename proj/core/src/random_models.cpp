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

#include "structmf/random_models.hpp"

#include <algorithm>
#include <string>

namespace structmf {

TargetModel random_pairwise_model(Rng& rng, int n_vars, double edge_prob,
                                  double w_scale, double h_scale) {
  std::vector<std::vector<double>> w(
      static_cast<std::size_t>(n_vars),
      std::vector<double>(static_cast<std::size_t>(n_vars), 0.0));
  for (int i = 0; i < n_vars; ++i)
    for (int j = i + 1; j < n_vars; ++j) {
      if (rng.uniform() >= edge_prob) continue;
      double wij = rng.uniform(-w_scale, w_scale);
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = wij;
      w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = wij;
    }
  std::vector<double> h(static_cast<std::size_t>(n_vars));
  for (double& b : h) b = rng.uniform(-h_scale, h_scale);
  return build_boltzmann(w, h, BoltzmannEncoding::kZeroOne);
}

TargetModel random_tree_model(Rng& rng, int n_vars, int max_card,
                              double scale) {
  TargetModel model;
  for (int v = 0; v < n_vars; ++v) {
    int card = max_card <= 2 ? 2 : 2 + rng.uniform_int(max_card - 1);
    model.variables.push_back({v, "x" + std::to_string(v), card});
  }
  CardinalityMap card = model.cardinalities();
  for (int v = 1; v < n_vars; ++v) {
    int parent = rng.uniform_int(v);
    Table t = make_table(Cluster{parent, v}, card);
    for (double& x : t.values()) x = rng.uniform(-scale, scale);
    model.factors.push_back(std::move(t));
  }
  for (int v = 0; v < n_vars; ++v) {
    Table t = make_table(Cluster{v}, card);
    for (double& x : t.values()) x = rng.uniform(-scale, scale);
    model.factors.push_back(std::move(t));
  }
  return model;
}

TreeStructure random_tree_structure(Rng& rng, int n_vars, int max_cluster) {
  TreeStructure t;
  int next_fresh = 0;
  auto take_fresh = [&](int want) {
    std::vector<int> out;
    while (want-- > 0 && next_fresh < n_vars) out.push_back(next_fresh++);
    return out;
  };

  std::vector<int> first = take_fresh(1 + rng.uniform_int(max_cluster));
  t.nodes.emplace_back(first);

  while (next_fresh < n_vars) {
    int anchor = rng.uniform_int(static_cast<int>(t.nodes.size()));
    const Cluster& base = t.nodes[static_cast<std::size_t>(anchor)];
    // Separator: a random non-empty subset of the anchor, so every variable's
    // node set stays connected (each id spreads only along tree edges).
    std::vector<int> pool = base.ids();
    rng.shuffle(pool);
    int sep_size = 1 + rng.uniform_int(static_cast<int>(pool.size()));
    std::vector<int> members(pool.begin(), pool.begin() + sep_size);
    // At least one fresh variable per cluster; the size cap is soft when the
    // separator already fills it.
    int room = max_cluster - sep_size;
    std::vector<int> fresh =
        take_fresh(room <= 0 ? 1 : 1 + rng.uniform_int(room));
    members.insert(members.end(), fresh.begin(), fresh.end());
    t.nodes.emplace_back(members);
    t.edges.emplace_back(anchor, static_cast<int>(t.nodes.size()) - 1);
  }
  return t;
}

}  // namespace structmf
