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

#ifndef STRUCTMF_ELIMINATION_HPP_
#define STRUCTMF_ELIMINATION_HPP_

#include <vector>

#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf {

struct EliminationOrder {
  std::vector<int> order;
  int induced_width = 0;
};

/// Min-fill greedy elimination order over the interaction graph in which each
/// cluster induces a clique. Ties break toward the lowest variable id, so the
/// result is deterministic. induced_width is exact for the returned order.
/// Every variable in 0..n_vars-1 must appear in some cluster.
EliminationOrder build_elimination_order(const std::vector<Cluster>& clusters,
                                         int n_vars);

/// Elimination order plus the maximal cliques of the triangulation it induces.
struct Triangulation {
  EliminationOrder order;
  std::vector<Cluster> cliques;
};

Triangulation triangulate(const std::vector<Cluster>& clusters, int n_vars);

/// Unnormalized log marginal of the product of `factors` over `keep`, by
/// variable elimination with a min-fill order over the remaining variables.
/// Exact for any input; cost grows with the induced width.
Table ve_log_marginal(std::span<const Table> factors, const CardinalityMap& card,
                      const Cluster& keep);

}  // namespace structmf

#endif  // STRUCTMF_ELIMINATION_HPP_
