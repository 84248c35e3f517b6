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

#ifndef STRUCTMF_TABLE_HPP_
#define STRUCTMF_TABLE_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "structmf/types.hpp"

namespace structmf {

/// Dense real-valued function over the joint states of a sorted variable
/// scope. Layout is row-major with the last scope variable fastest-changing.
///
/// By convention most of the library stores natural-log values here (log
/// potentials, log marginals); the junction-tree approximation keeps
/// probability-scale tables and says so where it does. Ops below are named by
/// the scale they assume.
class Table {
 public:
  Table() : values_(1, 0.0) {}  // scalar

  Table(Cluster scope, std::vector<int> cardinalities)
      : scope_(std::move(scope)), card_(std::move(cardinalities)) {
    init_strides();
    values_.assign(size_, 0.0);
  }

  Table(Cluster scope, std::vector<int> cardinalities,
        std::vector<double> values)
      : scope_(std::move(scope)), card_(std::move(cardinalities)) {
    init_strides();
    if (values.size() != size_)
      throw ValidationError("table has " + std::to_string(values.size()) +
                            " values, scope implies " + std::to_string(size_));
    values_ = std::move(values);
  }

  static Table scalar(double v) {
    Table t;
    t.values_[0] = v;
    return t;
  }

  const Cluster& scope() const { return scope_; }
  const std::vector<int>& cardinalities() const { return card_; }
  std::size_t size() const { return size_; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Cardinality of scope position i.
  int card(std::size_t i) const { return card_[i]; }
  /// Stride of scope position i in the flat layout.
  std::size_t stride(std::size_t i) const { return stride_[i]; }

  /// Flat index from per-scope-position states.
  std::size_t flat_index(std::span<const int> states) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < card_.size(); ++i)
      idx += static_cast<std::size_t>(states[i]) * stride_[i];
    return idx;
  }

  /// Per-scope-position states from a flat index.
  void decode(std::size_t flat, std::span<int> states) const {
    for (std::size_t i = 0; i < card_.size(); ++i) {
      states[i] = static_cast<int>(flat / stride_[i]) % card_[i];
    }
  }

  /// Value at the states a full assignment induces on this scope.
  double at_assignment(const Assignment& x) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < card_.size(); ++i) {
      int s = x.states[static_cast<std::size_t>(scope_[i])];
      idx += static_cast<std::size_t>(s) * stride_[i];
    }
    return values_[idx];
  }

 private:
  void init_strides() {
    if (card_.size() != scope_.size())
      throw ValidationError("scope/cardinality arity mismatch");
    stride_.assign(card_.size(), 1);
    size_ = 1;
    for (std::size_t i = card_.size(); i-- > 0;) {
      if (card_[i] < 1) throw ValidationError("non-positive cardinality");
      stride_[i] = size_;
      size_ *= static_cast<std::size_t>(card_[i]);
    }
  }

  Cluster scope_;
  std::vector<int> card_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
  std::vector<double> values_;
};

/// Lookup of per-variable cardinality, indexed by dense variable id.
using CardinalityMap = std::vector<int>;

/// Zero table over `scope` with cardinalities taken from `card`.
Table make_table(const Cluster& scope, const CardinalityMap& card);

/// For iterating a target scope while tracking the matching flat offset in a
/// table over a sub-scope: stride of each target scope position within the
/// source table (0 when the source does not contain that variable).
std::vector<std::size_t> projection_strides(const Table& target,
                                            const Table& source);

/// acc += sign * src broadcast over acc's (super)scope.
void add_projected(Table& acc, const Table& src, double sign = 1.0);

/// Sum of tables over the union scope (log-scale product of potentials).
Table log_product(std::span<const Table> factors, const CardinalityMap& card);

/// logsumexp over the variables not in `keep` (log-scale marginalization).
/// `keep` must be a subset of t's scope.
Table log_marginal(const Table& t, const Cluster& keep);

/// Plain sum over the variables not in `keep` (probability-scale
/// marginalization).
Table sum_marginal(const Table& t, const Cluster& keep);

/// Stable logsumexp over all entries.
double logsumexp(const Table& t);

double max_value(const Table& t);

/// Subtracts the max entry so the max becomes 0; returns the shift applied.
double max_normalize(Table& t);

/// Subtracts logsumexp so entries are normalized log probabilities; returns
/// the shift applied.
double log_normalize(Table& t);

/// Fixes observed variables to their states and drops them from the scope.
/// Variables absent from `evidence` are untouched; observed variables absent
/// from the scope are ignored.
Table slice(const Table& t, const std::map<int, int>& evidence);

/// exp of every entry.
Table exp_table(const Table& t);

/// log of every entry, flooring at `floor` first so the result stays finite.
Table log_table(const Table& t, double floor = 1e-300);

/// -sum p log p over a probability-scale table (0 log 0 := 0), in nats.
double entropy_nats(const Table& prob);

/// Stable log(exp(a) + exp(b)).
double log_add(double a, double b);

inline constexpr double kProbFloor = 1e-300;

}  // namespace structmf

#endif  // STRUCTMF_TABLE_HPP_
