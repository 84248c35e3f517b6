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

#ifndef STRUCTMF_DIRECTED_MF_HPP_
#define STRUCTMF_DIRECTED_MF_HPP_

#include <vector>

#include "structmf/junction_tree.hpp"
#include "structmf/mean_field.hpp"
#include "structmf/model.hpp"
#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf {

/// Chain-rule split of an ordered cluster sequence: separator s_g is the
/// overlap of c_g with all earlier clusters, residual r_g is the rest.
/// Every cluster after the first must contribute at least one new variable.
struct SeparatorSplit {
  std::vector<Cluster> separators;
  std::vector<Cluster> residuals;
};
SeparatorSplit derive_separators(const std::vector<Cluster>& clusters);

/// Approximation parameterized as a product of conditionals,
///   Q(x) = prod_g q_g(r_g | s_g),
/// stored as log tables over the full cluster scopes. Each table satisfies
/// logsumexp over the residual states = 0 at every separator state, which
/// makes Q normalized by construction (its tree reports log_z ~ 0).
struct DirectedApprox {
  std::vector<Cluster> clusters;
  std::vector<Cluster> separators;
  std::vector<Cluster> residuals;
  std::vector<Table> conditionals;  // log q_g, aligned with clusters
  CardinalityMap card;
  TreeStructure support;
  CompiledTree q_tree;
};

/// Starts from uniform conditionals. Cluster order is meaningful and kept.
DirectedApprox make_directed_approx(const TargetModel& p,
                                    std::vector<Cluster> clusters,
                                    int width_limit = kDefaultWidthLimit);

void rebuild_q_tree(DirectedApprox& q);

/// Replaces conditional gamma by the locally renormalized conditional
/// average of the energy,
///   q_g(r|s) proportional to exp< sum_a psi_a - sum_{b != g} log q_b >,
/// normalized over the residual at each separator state. Exact coordinate
/// minimizer for this parameterization; the free energy never increases.
void directed_mf_update(DirectedApprox& q, const TargetModel& p, int gamma);

DescentReport directed_optimize(DirectedApprox& q, const TargetModel& p,
                                const OptimizeOptions& opts = {});

/// Sets every conditional to log src(r_g | s_g). Reproduces src exactly
/// when src factorizes over the cluster structure.
void init_from_distribution(DirectedApprox& q, const CompiledTree& src);

/// max over clusters and separator states of |logsumexp over the residual|.
/// Zero up to rounding whenever the invariant above holds.
double local_normalization_defect(const DirectedApprox& q);

}  // namespace structmf

#endif  // STRUCTMF_DIRECTED_MF_HPP_
