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

#ifndef STRUCTMF_JT_APPROX_HPP_
#define STRUCTMF_JT_APPROX_HPP_

#include <vector>

#include "structmf/junction_tree.hpp"
#include "structmf/mean_field.hpp"
#include "structmf/model.hpp"
#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf {

/// Approximation carried directly as probability-scale junction tree
/// potentials,
///   Q(x) = prod_nodes Phi_g / prod_edges Phi_s,
/// kept consistent: every Phi sums to one and each separator potential is
/// the marginal of both endpoint potentials, so Phi_g is the Q-marginal
/// over its scope and no global normalizer is needed.
struct JunctionTreeApprox {
  TreeStructure structure;
  std::vector<Cluster> separators;  // aligned with structure.edges
  std::vector<Table> node_potentials;
  std::vector<Table> separator_potentials;
  CardinalityMap card;
};

/// Uniform potentials over the tree built from the given clusters.
JunctionTreeApprox make_jt_approx(const TargetModel& p,
                                  const std::vector<Cluster>& clusters,
                                  int width_limit = kDefaultWidthLimit);

/// Uniform potentials over an explicitly given tree, which must satisfy the
/// running intersection property and cover every variable.
JunctionTreeApprox make_jt_approx(const TargetModel& p,
                                  const TreeStructure& structure);

/// Reads calibrated marginals out of a compiled tree. The result represents
/// the same distribution and is exactly consistent.
JunctionTreeApprox jt_from_calibrated(const CompiledTree& src);

/// Log-space view of the same distribution for queries and free energy.
/// A consistent approximation compiles to a tree with log_z ~ 0.
CompiledTree to_compiled_tree(const JunctionTreeApprox& q);

/// Replaces node gamma's potential by the normalized exponentiated
/// conditional energy average (all target factors, minus the other node
/// potentials, plus all separator potentials, averaged under Q given the
/// node's scope), then restores consistency by distributing outward from
/// gamma. Exact coordinate minimizer over that potential.
void jt_mf_update(JunctionTreeApprox& q, const TargetModel& p, int gamma);

/// Pushes node kappa's potential through the tree: along every edge walked
/// away from kappa, the separator becomes the sender's marginal and the
/// receiver is scaled by the ratio of new to old separator (0/0 counts as
/// 0; a positive entry over a zero separator means the update grew support
/// where the receiver has none and is an error). The represented joint is
/// unchanged; afterwards the tree is consistent.
void distribute_evidence(JunctionTreeApprox& q, int kappa);

/// max over edges and separator states of the difference between either
/// endpoint marginal and the stored separator potential.
double consistency_defect(const JunctionTreeApprox& q);

/// The Q-marginal over node gamma's scope, read off the potential.
const Table& cluster_marginal(const JunctionTreeApprox& q, int gamma);

DescentReport jt_optimize(JunctionTreeApprox& q, const TargetModel& p,
                          const OptimizeOptions& opts = {});

}  // namespace structmf

#endif  // STRUCTMF_JT_APPROX_HPP_
