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

#include "structmf/brute_force.hpp"

#include <cmath>
#include <string>

namespace structmf {

namespace {

void check_cap(const TargetModel& model, std::uint64_t state_cap) {
  if (!enumeration_feasible(model, state_cap))
    throw StateCapError("joint state space exceeds the enumeration cap of " +
                        std::to_string(state_cap) + " states");
}

Cluster all_variables(std::size_t n) {
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
  return Cluster(ids);
}

Table normalized_log_joint_of_tree(const CompiledTree& q) {
  Table joint = log_product(q.input_factors(), q.cardinalities());
  if (joint.scope().size() != q.cardinalities().size())
    throw ValidationError("tree does not cover all variables");
  for (std::size_t i = 0; i < joint.size(); ++i) joint[i] -= q.log_z();
  return joint;
}

}  // namespace

bool enumeration_feasible(const TargetModel& model, std::uint64_t state_cap) {
  std::uint64_t n = 1;
  for (const Variable& v : model.variables) {
    const auto c = static_cast<std::uint64_t>(v.cardinality);
    if (n > state_cap / c) return false;
    n *= c;
  }
  return true;
}

EnumerationResult enumerate_joint(const TargetModel& model,
                                  std::uint64_t state_cap) {
  check_cap(model, state_cap);
  EnumerationResult r;
  Cluster all = all_variables(model.variables.size());
  Table joint = log_product(model.factors, model.cardinalities());
  if (!(joint.scope() == all)) {
    // Factors may miss isolated variables only if the model is invalid;
    // surface that as the coverage violation it is.
    throw ValidationError("factors do not cover all variables");
  }
  r.log_z = -log_normalize(joint);
  r.log_joint = std::move(joint);
  return r;
}

MarginalsResult brute_force_marginals(const TargetModel& model,
                                      const std::vector<Cluster>& targets,
                                      std::uint64_t state_cap) {
  EnumerationResult e = enumerate_joint(model, state_cap);
  MarginalsResult r;
  r.log_z = e.log_z;
  for (const Cluster& t : targets)
    r.marginals.push_back(exp_table(log_marginal(e.log_joint, t)));
  return r;
}

double enumeration_kl(const CompiledTree& q, const TargetModel& p,
                      std::uint64_t state_cap) {
  check_cap(p, state_cap);
  EnumerationResult pe = enumerate_joint(p, state_cap);
  Table q_joint = normalized_log_joint_of_tree(q);
  if (!(q_joint.scope() == pe.log_joint.scope()))
    throw ValidationError("approximation and target cover different variables");
  double kl = 0.0;
  for (std::size_t i = 0; i < q_joint.size(); ++i) {
    double lq = q_joint[i];
    double mass = std::exp(lq);
    if (mass <= 0.0) continue;  // 0 log 0 := 0
    kl += mass * (lq - pe.log_joint[i]);
  }
  return kl;
}

EventBound whittaker_event_bound(const CompiledTree& q, const TargetModel& p,
                                 double kl, std::uint64_t state_cap) {
  std::vector<Cluster> singles;
  for (std::size_t v = 0; v < p.variables.size(); ++v)
    singles.push_back(Cluster{static_cast<int>(v)});
  MarginalsResult pm = brute_force_marginals(p, singles, state_cap);
  EventBound b;
  b.bound = std::sqrt(std::max(kl, 0.0) / 2.0);
  for (std::size_t v = 0; v < singles.size(); ++v) {
    Table qm = q.marginal(singles[v]);
    for (std::size_t s = 0; s < qm.size(); ++s)
      b.max_discrepancy =
          std::max(b.max_discrepancy, std::abs(qm[s] - pm.marginals[v][s]));
  }
  return b;
}

}  // namespace structmf
