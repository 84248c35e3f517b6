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

#ifndef STRUCTMF_SIGMOID_BOUND_HPP_
#define STRUCTMF_SIGMOID_BOUND_HPP_

#include <vector>

#include "structmf/junction_tree.hpp"
#include "structmf/types.hpp"

namespace structmf {

/// log(1/(1+exp(-x))), computed without overflow at either tail.
double log_sigmoid(double x);

/// Curvature coefficient -tanh(xi/2)/(4 xi), continued to -1/8 at xi = 0.
/// Even in xi, always in (-1/8, 0].
double lambda_coeff(double xi);

/// Quadratic tangent lower bound on log_sigmoid:
///   x/2 + lambda(xi) x^2 + log_sigmoid(xi) - xi/2 - xi^2 lambda(xi),
/// equal to log_sigmoid(x) at x = +-xi and below it everywhere else.
double quadratic_log_sigmoid_bound(double x, double xi);

/// A binary observation with logistic likelihood attached to discrete
/// variables: the activation is z(x) = sum_k weights[k] * state(vars[k]) +
/// bias, and P(observed | x) = sigmoid(z) for observed = 1, sigmoid(-z)
/// for observed = 0.
struct LogisticUnit {
  std::vector<int> vars;
  std::vector<double> weights;
  double bias = 0.0;
  int observed = 1;
};

void validate_unit(const LogisticUnit& u, const CardinalityMap& card);

/// <z> under q.
double mean_activation(const CompiledTree& q, const LogisticUnit& u);

/// log < exp(a z) > under q, by recalibrating q with the tilt folded into
/// one extra unary table per attached variable.
double log_mgf(const CompiledTree& q, const LogisticUnit& u, double a);

/// Upper bound on -log < P(observed | z) >_q at the given xi:
///   xi <y> + log(<exp(-xi y)> + <exp((1 - xi) y)>),   y = -z for
/// observed = 1 and y = z for observed = 0. Valid for every xi; equality
/// holds when q puts all mass on one activation value and xi is optimal.
double sigmoid_evidence_bound(const CompiledTree& q, const LogisticUnit& u,
                              double xi);

struct XiSearchResult {
  double xi = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Minimizes the bound over xi in [0, 1] by golden-section search to an
/// interval of 1e-10, always evaluating both endpoints; among values within
/// 1e-12 of the best, the smallest xi wins. Deterministic.
XiSearchResult optimize_xi(const CompiledTree& q, const LogisticUnit& u);

}  // namespace structmf

#endif  // STRUCTMF_SIGMOID_BOUND_HPP_
