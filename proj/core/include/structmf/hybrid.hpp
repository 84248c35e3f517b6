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

#ifndef STRUCTMF_HYBRID_HPP_
#define STRUCTMF_HYBRID_HPP_

#include <vector>

namespace structmf {

/// Mixture-of-Gaussians scalar x with a logistic binary observation:
///   P(t) = mixture[t],  x | t ~ Normal(means[t], variances[t]),
///   P(observed = 1 | x) = sigmoid(w x + b).
struct HybridModel {
  std::vector<double> mixture;
  std::vector<double> means;
  std::vector<double> variances;
  double w = 0.0;
  double b = 0.0;
  int observed = 1;
};

void validate_hybrid(const HybridModel& m);

/// Quadratic exponent g + h x + k x^2 / 2.
struct QuadraticExponent {
  double g = 0.0;
  double h = 0.0;
  double k = 0.0;
};

/// Tangent lower bound on the log likelihood of the observation,
///   log sigmoid((2 observed - 1)(w x + b)) >= g + h x + k x^2 / 2,
/// tight where |w x + b| = xi. k is never positive.
QuadraticExponent logistic_quadratic(double w, double b, int observed,
                                     double xi);

/// log Normal(x; mean, variance) written in the same quadratic form.
QuadraticExponent gaussian_natural(double mean, double variance);

/// Variational posterior Q(t, x) = weights[t] Normal(x; means[t],
/// variances[t]), together with the bound parameters that produced it.
/// `bound` is an upper bound on -log P(observed).
struct HybridPosterior {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  std::vector<double> xi;
  double bound = 0.0;
};

/// kPerComponent keeps one xi per mixture component; kShared forces a
/// single xi, which couples the components through one curvature.
enum class XiMode { kPerComponent, kShared };

/// Exact minimizer of the bound over Q at fixed xi: each component's
/// Gaussian is the prior tilted by the quadratic likelihood bound, and the
/// weights are the tilted normalizers. Sets `bound`.
HybridPosterior optimal_posterior(const HybridModel& m,
                                  const std::vector<double>& xi);

/// The bound value for an arbitrary (Q, xi) pair.
double hybrid_bound(const HybridModel& m, const HybridPosterior& q);

/// Exact minimizer of the bound over xi at fixed Q: per component the root
/// of the posterior second moment of w x + b, or in shared mode the root
/// of the mixture second moment, repeated for every component.
std::vector<double> update_xi(const HybridModel& m, const HybridPosterior& q,
                              XiMode mode);

/// The same second-moment rule evaluated under the prior. Initialization.
std::vector<double> prior_xi(const HybridModel& m, XiMode mode);

struct HybridFitReport {
  HybridPosterior posterior;
  std::vector<double> bound_trace;  // bound after each posterior update
  int iterations = 0;
  bool converged = false;
};

/// Alternates optimal_posterior and update_xi from the prior-moment xi
/// until xi moves less than tol. Each half step is an exact minimization,
/// so the trace never increases; if the loop runs out of iterations the
/// best iterate seen is returned.
HybridFitReport hybrid_fit(const HybridModel& m, XiMode mode,
                           double tol = 1e-12, int max_iters = 500);

/// Unnormalized density sum_t P(t) Normal(x; t) P(observed | x).
/// Integrates to P(observed).
double exact_joint_density(const HybridModel& m, double x);

/// The same sum with the logistic factor replaced by its quadratic bound
/// at the given xi. Pointwise below exact_joint_density; integrates to a
/// lower bound on P(observed).
double bound_joint_density(const HybridModel& m, const std::vector<double>& xi,
                           double x);

}  // namespace structmf

#endif  // STRUCTMF_HYBRID_HPP_
