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

#include "structmf/sigmoid_bound.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "structmf/errors.hpp"
#include "structmf/table.hpp"

namespace structmf {

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double lambda_coeff(double xi) {
  double u = std::abs(xi);
  // tanh(u/2)/(4u) loses digits near zero; two Taylor terms are exact to
  // double precision below this cutoff.
  if (u < 1e-4) return -0.125 + u * u / 96.0;
  return -std::tanh(u / 2.0) / (4.0 * u);
}

double quadratic_log_sigmoid_bound(double x, double xi) {
  double lam = lambda_coeff(xi);
  return x / 2.0 + lam * x * x + log_sigmoid(xi) - xi / 2.0 - xi * xi * lam;
}

void validate_unit(const LogisticUnit& u, const CardinalityMap& card) {
  if (u.vars.size() != u.weights.size())
    throw ValidationError("unit has " + std::to_string(u.vars.size()) +
                          " variables but " + std::to_string(u.weights.size()) +
                          " weights");
  std::set<int> seen;
  for (int v : u.vars) {
    if (v < 0 || v >= static_cast<int>(card.size()))
      throw ValidationError("unit variable " + std::to_string(v) +
                            " out of range");
    if (!seen.insert(v).second)
      throw ValidationError("unit attaches variable " + std::to_string(v) +
                            " twice");
  }
  for (double w : u.weights)
    if (!std::isfinite(w)) throw ValidationError("non-finite unit weight");
  if (!std::isfinite(u.bias)) throw ValidationError("non-finite unit bias");
  if (u.observed != 0 && u.observed != 1)
    throw ValidationError("unit observation must be 0 or 1");
}

double mean_activation(const CompiledTree& q, const LogisticUnit& u) {
  validate_unit(u, q.cardinalities());
  double m = u.bias;
  for (std::size_t k = 0; k < u.vars.size(); ++k) {
    Table marg = q.marginal(Cluster{u.vars[k]});
    double mean_state = 0.0;
    for (std::size_t s = 0; s < marg.size(); ++s)
      mean_state += static_cast<double>(s) * marg[s];
    m += u.weights[k] * mean_state;
  }
  return m;
}

double log_mgf(const CompiledTree& q, const LogisticUnit& u, double a) {
  validate_unit(u, q.cardinalities());
  if (a == 0.0) return 0.0;
  std::vector<Table> tilts;
  for (std::size_t k = 0; k < u.vars.size(); ++k) {
    Table t = make_table(Cluster{u.vars[k]}, q.cardinalities());
    for (std::size_t s = 0; s < t.size(); ++s)
      t[s] = a * u.weights[k] * static_cast<double>(s);
    tilts.push_back(std::move(t));
  }
  CompiledTree tilted = q.reweighted(tilts);
  return tilted.log_z() - q.log_z() + a * u.bias;
}

double sigmoid_evidence_bound(const CompiledTree& q, const LogisticUnit& u,
                              double xi) {
  double m = mean_activation(q, u);
  if (u.observed == 0)
    return xi * m + log_add(log_mgf(q, u, -xi), log_mgf(q, u, 1.0 - xi));
  return -xi * m + log_add(log_mgf(q, u, xi), log_mgf(q, u, xi - 1.0));
}

XiSearchResult optimize_xi(const CompiledTree& q, const LogisticUnit& u) {
  std::vector<std::pair<double, double>> evals;  // (xi, bound)
  auto eval = [&](double xi) {
    double v = sigmoid_evidence_bound(q, u, xi);
    evals.push_back({xi, v});
    return v;
  };

  eval(0.0);
  eval(1.0);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }

  XiSearchResult r;
  r.evaluations = static_cast<int>(evals.size());
  double best = evals[0].second;
  for (const auto& [xi, v] : evals) best = std::min(best, v);
  r.xi = 2.0;  // above every candidate
  for (const auto& [xi, v] : evals)
    if (v <= best + 1e-12 && xi < r.xi) {
      r.xi = xi;
      r.value = v;
    }
  return r;
}

}  // namespace structmf
