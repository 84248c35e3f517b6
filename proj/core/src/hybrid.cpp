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

#include "structmf/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "structmf/errors.hpp"
#include "structmf/sigmoid_bound.hpp"
#include "structmf/table.hpp"

namespace structmf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double floored_log(double p) {
  return std::log(p < kProbFloor ? kProbFloor : p);
}

// Posterior second moment of w x + b for component t, the square of the
// optimal xi.
double second_moment(const HybridModel& m, double mean, double variance) {
  return m.w * m.w * (mean * mean + variance) + 2.0 * m.w * m.b * mean +
         m.b * m.b;
}

}  // namespace

void validate_hybrid(const HybridModel& m) {
  std::size_t t = m.mixture.size();
  if (t == 0) throw ValidationError("mixture has no components");
  if (m.means.size() != t || m.variances.size() != t)
    throw ValidationError("mixture, means and variances differ in length");
  double total = 0.0;
  for (double p : m.mixture) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ValidationError("mixture weights must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("mixture weights sum to " + std::to_string(total));
  for (double v : m.variances)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError("variances must be positive");
  for (double mu : m.means)
    if (!std::isfinite(mu)) throw ValidationError("non-finite mixture mean");
  if (!std::isfinite(m.w) || !std::isfinite(m.b))
    throw ValidationError("non-finite observation parameters");
  if (m.observed != 0 && m.observed != 1)
    throw ValidationError("observation must be 0 or 1");
}

QuadraticExponent logistic_quadratic(double w, double b, int observed,
                                     double xi) {
  double sign = observed == 1 ? 1.0 : -1.0;
  double lam = lambda_coeff(xi);
  QuadraticExponent q;
  q.g = log_sigmoid(xi) + 0.5 * sign * b - 0.5 * xi + lam * (b * b - xi * xi);
  q.h = 0.5 * sign * w + 2.0 * lam * b * w;
  q.k = 2.0 * lam * w * w;
  return q;
}

QuadraticExponent gaussian_natural(double mean, double variance) {
  QuadraticExponent q;
  q.h = mean / variance;
  q.k = -1.0 / variance;
  q.g = q.h * q.h / (2.0 * q.k) - 0.5 * std::log(kTwoPi / (-q.k));
  return q;
}

HybridPosterior optimal_posterior(const HybridModel& m,
                                  const std::vector<double>& xi) {
  validate_hybrid(m);
  std::size_t t_count = m.mixture.size();
  if (xi.size() != t_count)
    throw ValidationError("xi count does not match the mixture");

  HybridPosterior q;
  q.xi = xi;
  std::vector<double> log_tilde(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    QuadraticExponent prior = gaussian_natural(m.means[t], m.variances[t]);
    QuadraticExponent like = logistic_quadratic(m.w, m.b, m.observed, xi[t]);
    double h = prior.h + like.h;
    double precision = -(prior.k + like.k);  // > 0, like.k is never positive
    double s2 = 1.0 / precision;
    double mu = h * s2;
    q.means.push_back(mu);
    q.variances.push_back(s2);
    // log integral of p_t exp(prior + like) over x.
    log_tilde[t] = floored_log(m.mixture[t]) + prior.g + like.g +
                   0.5 * std::log(kTwoPi * s2) + mu * mu / (2.0 * s2);
  }
  double lse = log_tilde[0];
  for (std::size_t t = 1; t < t_count; ++t) lse = log_add(lse, log_tilde[t]);
  for (std::size_t t = 0; t < t_count; ++t)
    q.weights.push_back(std::exp(log_tilde[t] - lse));
  q.bound = hybrid_bound(m, q);
  return q;
}

double hybrid_bound(const HybridModel& m, const HybridPosterior& q) {
  double value = 0.0;
  for (std::size_t t = 0; t < m.mixture.size(); ++t) {
    double qt = q.weights[t];
    if (qt <= 0.0) continue;
    double mu = q.means[t];
    double s2 = q.variances[t];
    QuadraticExponent prior = gaussian_natural(m.means[t], m.variances[t]);
    QuadraticExponent like = logistic_quadratic(m.w, m.b, m.observed, q.xi[t]);
    double h = prior.h + like.h;
    double k = prior.k + like.k;
    value += qt * (std::log(qt) - 0.5 * std::log(std::numbers::e * kTwoPi * s2));
    value -= qt * (floored_log(m.mixture[t]) + prior.g + like.g + h * mu +
                   k * (mu * mu + s2) / 2.0);
  }
  return value;
}

std::vector<double> update_xi(const HybridModel& m, const HybridPosterior& q,
                              XiMode mode) {
  std::size_t t_count = m.mixture.size();
  std::vector<double> xi(t_count, 0.0);
  if (mode == XiMode::kPerComponent) {
    for (std::size_t t = 0; t < t_count; ++t)
      xi[t] = std::sqrt(second_moment(m, q.means[t], q.variances[t]));
    return xi;
  }
  double mix = 0.0;
  for (std::size_t t = 0; t < t_count; ++t)
    mix += q.weights[t] * second_moment(m, q.means[t], q.variances[t]);
  std::fill(xi.begin(), xi.end(), std::sqrt(mix));
  return xi;
}

std::vector<double> prior_xi(const HybridModel& m, XiMode mode) {
  validate_hybrid(m);
  std::size_t t_count = m.mixture.size();
  std::vector<double> xi(t_count, 0.0);
  if (mode == XiMode::kPerComponent) {
    for (std::size_t t = 0; t < t_count; ++t)
      xi[t] = std::sqrt(second_moment(m, m.means[t], m.variances[t]));
    return xi;
  }
  double mix = 0.0;
  for (std::size_t t = 0; t < t_count; ++t)
    mix += m.mixture[t] * second_moment(m, m.means[t], m.variances[t]);
  std::fill(xi.begin(), xi.end(), std::sqrt(mix));
  return xi;
}

HybridFitReport hybrid_fit(const HybridModel& m, XiMode mode, double tol,
                           int max_iters) {
  HybridFitReport rep;
  std::vector<double> xi = prior_xi(m, mode);
  HybridPosterior best;
  bool have_best = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    HybridPosterior q = optimal_posterior(m, xi);
    rep.bound_trace.push_back(q.bound);
    rep.iterations = iter + 1;
    if (!have_best || q.bound < best.bound) {
      best = q;
      have_best = true;
    }
    std::vector<double> next = update_xi(m, q, mode);
    double dx = 0.0;
    for (std::size_t t = 0; t < xi.size(); ++t)
      dx = std::max(dx, std::abs(next[t] - xi[t]));
    xi = std::move(next);
    if (dx <= tol) {
      rep.converged = true;
      rep.posterior = std::move(q);
      return rep;
    }
  }
  rep.posterior = std::move(best);
  return rep;
}

double exact_joint_density(const HybridModel& m, double x) {
  double z = m.w * x + m.b;
  double sign = m.observed == 1 ? 1.0 : -1.0;
  double like = std::exp(log_sigmoid(sign * z));
  double total = 0.0;
  for (std::size_t t = 0; t < m.mixture.size(); ++t) {
    double d = x - m.means[t];
    total += m.mixture[t] *
             std::exp(-d * d / (2.0 * m.variances[t])) /
             std::sqrt(kTwoPi * m.variances[t]);
  }
  return total * like;
}

double bound_joint_density(const HybridModel& m, const std::vector<double>& xi,
                           double x) {
  if (xi.size() != m.mixture.size())
    throw ValidationError("xi count does not match the mixture");
  double total = 0.0;
  for (std::size_t t = 0; t < m.mixture.size(); ++t) {
    QuadraticExponent prior = gaussian_natural(m.means[t], m.variances[t]);
    QuadraticExponent like = logistic_quadratic(m.w, m.b, m.observed, xi[t]);
    total += m.mixture[t] * std::exp(prior.g + like.g + (prior.h + like.h) * x +
                                     (prior.k + like.k) * x * x / 2.0);
  }
  return total;
}

}  // namespace structmf
