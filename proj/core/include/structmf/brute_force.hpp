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

#ifndef STRUCTMF_BRUTE_FORCE_HPP_
#define STRUCTMF_BRUTE_FORCE_HPP_

#include <cstdint>
#include <vector>

#include "structmf/junction_tree.hpp"
#include "structmf/model.hpp"
#include "structmf/table.hpp"

namespace structmf {

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 24;

/// True when the full joint fits under the cap (and enumeration may run).
bool enumeration_feasible(const TargetModel& model,
                          std::uint64_t state_cap = kDefaultStateCap);

/// Exact log normalizer and normalized log joint over all variables, by full
/// enumeration. Throws StateCapError above the cap.
struct EnumerationResult {
  double log_z = 0.0;
  Table log_joint;  // scope = all variables, logsumexp = 0
};

EnumerationResult enumerate_joint(const TargetModel& model,
                                  std::uint64_t state_cap = kDefaultStateCap);

struct MarginalsResult {
  double log_z = 0.0;
  std::vector<Table> marginals;  // probability scale, aligned with targets
};

MarginalsResult brute_force_marginals(const TargetModel& model,
                                      const std::vector<Cluster>& targets,
                                      std::uint64_t state_cap = kDefaultStateCap);

/// sum_x Q(x) log(Q(x)/P(x)) by enumeration; Q is the distribution the
/// compiled tree represents. The project-wide KL oracle.
double enumeration_kl(const CompiledTree& q, const TargetModel& p,
                      std::uint64_t state_cap = kDefaultStateCap);

/// Largest |P(A) - Q(A)| over single-variable events A, against the bound
/// sqrt(max(kl, 0) / 2) that must dominate it.
struct EventBound {
  double max_discrepancy = 0.0;
  double bound = 0.0;
  bool holds(double slack = 1e-9) const {
    return max_discrepancy <= bound + slack;
  }
};

EventBound whittaker_event_bound(const CompiledTree& q, const TargetModel& p,
                                 double kl,
                                 std::uint64_t state_cap = kDefaultStateCap);

}  // namespace structmf

#endif  // STRUCTMF_BRUTE_FORCE_HPP_
