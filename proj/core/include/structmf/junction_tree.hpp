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

#ifndef STRUCTMF_JUNCTION_TREE_HPP_
#define STRUCTMF_JUNCTION_TREE_HPP_

#include <utility>
#include <vector>

#include "structmf/model.hpp"
#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf {

inline constexpr int kDefaultWidthLimit = 12;

/// Cluster tree skeleton. Edges connect node indices; separators are derived
/// as pairwise intersections. A valid structure is a spanning tree satisfying
/// the running intersection property (empty separators are allowed and join
/// otherwise independent components).
struct TreeStructure {
  std::vector<Cluster> nodes;
  std::vector<std::pair<int, int>> edges;
};

/// Triangulates the interaction graph induced by `clusters` (min-fill) and
/// joins the maximal cliques by a maximum-weight spanning tree on separator
/// sizes. Every input cluster is contained in some node of the result.
/// Throws TractabilityError when the induced width exceeds width_limit.
TreeStructure tree_structure_from_clusters(const std::vector<Cluster>& clusters,
                                           int n_vars,
                                           int width_limit = kDefaultWidthLimit);

/// Checks: non-empty node list covering all variables, edges form a spanning
/// tree, and every variable's node set induces a connected subtree (the
/// running intersection property). Throws ValidationError on violation.
void validate_tree_structure(const TreeStructure& t, int n_vars);

/// A cluster tree with log-scale potentials, calibrated so that every node
/// potential is the unnormalized log marginal of the represented joint over
/// its scope (logsumexp of any node equals log_z). Queries are read-only;
/// the represented distribution is fixed at compile time.
class CompiledTree {
 public:
  CompiledTree() = default;

  const TreeStructure& structure() const { return structure_; }
  const CardinalityMap& cardinalities() const { return card_; }
  int num_nodes() const { return static_cast<int>(structure_.nodes.size()); }
  int num_edges() const { return static_cast<int>(structure_.edges.size()); }
  const Cluster& node_scope(int i) const {
    return structure_.nodes[static_cast<std::size_t>(i)];
  }
  const Cluster& separator(int e) const {
    return separators_[static_cast<std::size_t>(e)];
  }
  const std::vector<Table>& input_factors() const { return input_factors_; }

  bool calibrated() const { return calibrated_; }
  double log_z() const { return log_z_; }

  /// Calibrated log potential of node i; logsumexp equals log_z().
  const Table& node_potential(int i) const {
    return pots_[static_cast<std::size_t>(i)];
  }
  const Table& separator_potential(int e) const {
    return sep_pots_[static_cast<std::size_t>(e)];
  }

  /// Index of the first node whose scope contains c, or -1.
  int node_containing(const Cluster& c) const;

  /// Normalized log marginal over `target` (entries logsumexp to 0). Targets
  /// outside every node fall back to variable elimination over the input
  /// factors, which stays exact at higher cost.
  Table log_marginal_over(const Cluster& target) const;

  /// Normalized probability-scale marginal over `target`; entries sum to 1.
  Table marginal(const Cluster& target) const;

  /// H(Q) in nats from the calibrated node and separator marginals.
  double entropy() const;

  /// <f> under the represented distribution; f's values are averaged as-is.
  double expectation(const Table& f) const;

  /// Entry at state s of `given` is <f> under Q(. | given = s); states of
  /// `given` with mass below 1e-300 get the unconditional mean. The result
  /// carries raw expectation values, not probabilities.
  Table conditional_expectation(const Table& f, const Cluster& given) const;

  /// Runs a full collect/distribute pass. Compilation already calibrates;
  /// calling again is near-idempotent (float-level changes only).
  void calibrate();

  /// Same structure and factor set with `extra` appended, recalibrated.
  CompiledTree reweighted(std::span<const Table> extra) const;

  /// Same structure, input factors replaced wholesale, recalibrated.
  CompiledTree with_factors(std::span<const Table> factors) const;

  friend CompiledTree compile_tree(TreeStructure structure,
                                   const CardinalityMap& card,
                                   std::span<const Table> factors);

 private:
  void pour_and_calibrate();

  TreeStructure structure_;
  std::vector<Cluster> separators_;
  CardinalityMap card_;
  std::vector<int> visit_order_;  // breadth-first from node 0
  std::vector<int> parent_edge_;  // edge to the BFS parent, -1 at the root
  std::vector<Table> input_factors_;
  std::vector<int> factor_node_;
  std::vector<Table> pots_;
  std::vector<Table> sep_pots_;
  double log_z_ = 0.0;
  bool calibrated_ = false;
};

/// Compiles and calibrates a tree over an explicit structure. Each factor is
/// multiplied into the first node containing its scope; a factor fitting no
/// node is an error.
CompiledTree compile_tree(TreeStructure structure, const CardinalityMap& card,
                          std::span<const Table> factors);

/// Structure from triangulating `clusters`, then compile_tree.
CompiledTree compile_junction_tree(const std::vector<Cluster>& clusters,
                                   std::span<const Table> factors,
                                   const CardinalityMap& card,
                                   int width_limit = kDefaultWidthLimit);

/// Tree over the model's own factor scopes; log_z() is the model's log
/// normalizer.
CompiledTree compile_model_tree(const TargetModel& model,
                                int width_limit = kDefaultWidthLimit);

/// -H(Q) - <sum of p's factors> under Q: the KL divergence up to p's log
/// normalizer. Defined for any p whose factor scopes are tractable against q.
double free_energy(const CompiledTree& q, const TargetModel& p);

enum class KlMode { kExact, kFreeEnergy };

/// kExact returns free_energy + log_z_p, taking log_z_p from p.log_z when
/// present and otherwise from exact inference on p (which may throw
/// TractabilityError). kFreeEnergy needs no normalizer.
double kl_divergence(const CompiledTree& q, const TargetModel& p,
                     KlMode mode = KlMode::kExact);

}  // namespace structmf

#endif  // STRUCTMF_JUNCTION_TREE_HPP_
