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

#ifndef STRUCTMF_MODEL_HPP_
#define STRUCTMF_MODEL_HPP_

#include <map>
#include <optional>
#include <vector>

#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf {

/// An unnormalized discrete distribution: a product of potentials given by
/// their log tables. log_z, when known, is the log normalizer.
struct TargetModel {
  std::vector<Variable> variables;
  std::vector<Table> factors;
  std::optional<double> log_z;

  CardinalityMap cardinalities() const {
    CardinalityMap card(variables.size());
    for (const Variable& v : variables)
      card[static_cast<std::size_t>(v.id)] = v.cardinality;
    return card;
  }

  /// Product of all cardinalities; saturates at the cap.
  std::uint64_t joint_states(std::uint64_t cap = UINT64_MAX) const;
};

/// Throws ValidationError unless all model invariants hold: dense unique ids,
/// cardinality >= 2, factor scopes valid and non-empty (scalar factors are
/// allowed after evidence absorption), finite entries, full coverage.
void validate_model(const TargetModel& model);

enum class BoltzmannEncoding { kZeroOne, kPlusMinus };

/// Pairwise binary model with energy sum_{i<j} w_ij x_i x_j + sum_k h_k x_k.
/// One pairwise factor per nonzero upper-triangle weight, one unary factor
/// per variable. State 0 maps to value 0 or -1 depending on the encoding.
TargetModel build_boltzmann(const std::vector<std::vector<double>>& weights,
                            const std::vector<double>& biases,
                            BoltzmannEncoding encoding);

/// One conditional probability table. `probs` is laid out with the parent
/// configuration as the row index (parents in the given order, last parent
/// fastest) and the child state fastest within a row; each row sums to 1.
struct Cpt {
  int child = 0;
  std::vector<int> parents;
  std::vector<double> probs;
};

/// Bayesian network as a target model: one factor per child over
/// {child} u parents with entries log P(child|parents), probabilities floored
/// at 1e-300 before the log. Requires exactly one CPT per variable and an
/// acyclic parent relation; log_z = 0.
TargetModel bayesian_network_to_target(std::vector<Variable> variables,
                                       const std::vector<Cpt>& cpts);

/// Evidence absorption result. Observed variables are gone from the model and
/// the survivors are re-densified to 0..k-1.
struct EvidenceResult {
  TargetModel model;
  std::vector<int> old_to_new;  // -1 for observed variables
  std::vector<int> new_to_old;
};

/// Slices every factor at the observed states and drops observed variables.
/// The result's log_z is unknown (it shifted by log P(evidence)).
EvidenceResult absorb_evidence(const TargetModel& model,
                               const std::map<int, int>& evidence);

/// sum_a psi_a(d_a(x)). Adding log_z when known yields log P(x).
double unnormalized_log_score(const TargetModel& model, const Assignment& x);

}  // namespace structmf

#endif  // STRUCTMF_MODEL_HPP_
