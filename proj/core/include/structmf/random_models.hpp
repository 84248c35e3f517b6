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

#ifndef STRUCTMF_RANDOM_MODELS_HPP_
#define STRUCTMF_RANDOM_MODELS_HPP_

#include "structmf/junction_tree.hpp"
#include "structmf/model.hpp"
#include "structmf/rng.hpp"

namespace structmf {

/// Binary pairwise model: every edge kept with `edge_prob`, weights uniform
/// in [-w_scale, w_scale], biases uniform in [-h_scale, h_scale], {0,1}
/// encoding. Unary factors exist for every variable, so coverage holds even
/// when no edge survives.
TargetModel random_pairwise_model(Rng& rng, int n_vars, double edge_prob,
                                  double w_scale, double h_scale);

/// Model whose factors sit on the edges of a random spanning tree (plus unary
/// factors), log values uniform in [-scale, scale]. Cardinality per variable
/// uniform in [2, max_card].
TargetModel random_tree_model(Rng& rng, int n_vars, int max_card = 2,
                              double scale = 1.0);

/// Random connected cluster tree over n_vars variables with clusters of size
/// up to max_cluster, built so the running intersection property holds by
/// construction. Useful as a Q structure or an approximation skeleton.
TreeStructure random_tree_structure(Rng& rng, int n_vars, int max_cluster = 3);

}  // namespace structmf

#endif  // STRUCTMF_RANDOM_MODELS_HPP_
