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

#ifndef STRUCTMF_MEAN_FIELD_HPP_
#define STRUCTMF_MEAN_FIELD_HPP_

#include <cstdint>
#include <vector>

#include "structmf/junction_tree.hpp"
#include "structmf/model.hpp"
#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf {

/// Order in which clusters are visited within one sweep. kRandom reshuffles
/// every sweep from a generator seeded once at the start of the run.
struct Schedule {
  enum class Kind { kSequential, kReverse, kRandom };
  Kind kind = Kind::kSequential;
  std::uint64_t seed = 0;
};

struct OptimizeOptions {
  Schedule schedule;
  double tol = 1e-9;    // sup-norm change of any potential over a full sweep
  int max_sweeps = 1000;
};

struct DescentReport {
  std::vector<double> fe_trace;  // free energy before the run, then after
                                 // every single cluster update
  int updates = 0;
  int sweeps = 0;
  bool converged = false;
  double final_sup_change = 0.0;
};

/// Structured approximation Q over adjustable log potentials, one per
/// cluster, optionally sharing factors of the target verbatim. The
/// represented distribution is
///   Q(x) = exp(sum_g phi_g + sum_{a copied} psi_a - z_Q)
/// with z_Q read off q_tree. Adjustable potentials are kept max-normalized;
/// copied tables never change.
struct UndirectedApprox {
  std::vector<Cluster> clusters;  // scopes of the adjustable potentials
  std::vector<Table> variational; // log phi_g, aligned with clusters
  std::vector<int> copied_source; // indices into the target's factor list
  std::vector<Table> copied;      // the copied factors themselves
  CardinalityMap card;
  TreeStructure support;          // fixed tree over all scopes above
  CompiledTree q_tree;            // calibrated representation of Q

  double log_z() const { return q_tree.log_z(); }
};

/// Builds the approximation with zero adjustable potentials, so Q starts
/// uniform when nothing is copied and proportional to the copied factors
/// otherwise. The cluster scopes and copied factor scopes together must
/// cover every variable; the support tree is built once from their union
/// and reused for the lifetime of the approximation.
UndirectedApprox make_undirected_approx(const TargetModel& p,
                                        std::vector<Cluster> clusters,
                                        std::vector<int> copied_factors = {},
                                        int width_limit = kDefaultWidthLimit);

/// Recompiles q_tree from the current potentials. Update routines call this
/// themselves; call it manually after editing `variational` directly.
void rebuild_q_tree(UndirectedApprox& q);

/// Fills every adjustable potential with draws from
/// uniform(-amplitude, amplitude) and recompiles. Restart helper.
void seed_variational(UndirectedApprox& q, std::uint64_t seed,
                      double amplitude = 0.1);

/// Terms whose conditional average can vary with the state of cluster gamma:
/// target factors touching gamma's connected component of the support scope
/// intersection graph (copied factors excluded, they cancel against their
/// twin inside Q), and the other adjustable potentials in that component.
/// Dropping the rest changes the unnormalized update by a constant only.
struct DependencySets {
  std::vector<int> target_factors;
  std::vector<int> other_clusters;
};
DependencySets dependency_sets(const UndirectedApprox& q, const TargetModel& p,
                               int gamma);

/// Replaces phi_gamma by the conditional average of the energy it is
/// responsible for,
///   phi_gamma(c) <- < sum_{a in D} psi_a - sum_{b in C} phi_b >_{Q(.|c)},
/// max-normalized, then recompiles. This is the exact minimizer of the
/// divergence from Q to the target over phi_gamma alone, so the free energy
/// never increases. mf_update uses dependency_sets; the _with_sets variant
/// accepts any conservative superset and lands on the same potential up to
/// rounding.
void mf_update(UndirectedApprox& q, const TargetModel& p, int gamma);
void mf_update_with_sets(UndirectedApprox& q, const TargetModel& p, int gamma,
                         const DependencySets& sets);

/// Sweeps cluster updates under the schedule until the largest potential
/// change over a sweep drops to tol or max_sweeps is hit. The trace holds
/// free_energy(q_tree, p) before the run and after every update.
DescentReport optimize(UndirectedApprox& q, const TargetModel& p,
                       const OptimizeOptions& opts = {});

/// sum_b H(marginal over block b) - H(marginal over the whole cluster),
/// the information lost by splitting the cluster into the given blocks.
/// Nonnegative; zero iff the blocks are independent under q. The blocks
/// must partition the cluster.
double factorization_gap(const CompiledTree& q, const Cluster& cluster,
                         const std::vector<Cluster>& blocks);

/// Sets the adjustable potentials to the chain of conditional marginals of
/// `src` along the stored cluster order (each cluster contributes its
/// marginal divided by the marginal over the overlap with earlier clusters).
/// When src factorizes over the cluster structure and nothing is copied, Q
/// reproduces src exactly; otherwise this is a projection onto the family.
void init_from_distribution(UndirectedApprox& q, const CompiledTree& src);

}  // namespace structmf

#endif  // STRUCTMF_MEAN_FIELD_HPP_
