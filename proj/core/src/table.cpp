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

#include "structmf/table.hpp"

#include <cmath>
#include <limits>

namespace structmf {

namespace {

// Walks all joint states of `shape` in flat order while maintaining flat
// offsets into tables over sub-scopes. strides[k][i] is the stride of shape
// position i inside table k (0 if absent).
class Odometer {
 public:
  Odometer(const Table& shape, std::vector<std::vector<std::size_t>> strides)
      : shape_(shape),
        strides_(std::move(strides)),
        digits_(shape.scope().size(), 0),
        offsets_(strides_.size(), 0) {}

  std::size_t offset(std::size_t k) const { return offsets_[k]; }

  // Advances to the next flat index of the shape. Returns false after the
  // last state.
  bool next() {
    const auto& card = shape_.cardinalities();
    for (std::size_t i = card.size(); i-- > 0;) {
      if (++digits_[i] < card[i]) {
        for (std::size_t k = 0; k < strides_.size(); ++k)
          offsets_[k] += strides_[k][i];
        return true;
      }
      digits_[i] = 0;
      for (std::size_t k = 0; k < strides_.size(); ++k)
        offsets_[k] -= strides_[k][i] * static_cast<std::size_t>(card[i] - 1);
    }
    return false;
  }

 private:
  const Table& shape_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<int> digits_;
  std::vector<std::size_t> offsets_;
};

}  // namespace

Table make_table(const Cluster& scope, const CardinalityMap& card) {
  std::vector<int> dims;
  dims.reserve(scope.size());
  for (int v : scope.ids()) {
    if (v < 0 || static_cast<std::size_t>(v) >= card.size())
      throw ValidationError("variable id " + std::to_string(v) +
                            " out of range");
    dims.push_back(card[static_cast<std::size_t>(v)]);
  }
  return Table(scope, std::move(dims));
}

std::vector<std::size_t> projection_strides(const Table& target,
                                            const Table& source) {
  std::vector<std::size_t> strides(target.scope().size(), 0);
  for (std::size_t i = 0; i < target.scope().size(); ++i) {
    int pos = source.scope().index_of(target.scope()[i]);
    if (pos >= 0) strides[i] = source.stride(static_cast<std::size_t>(pos));
  }
  return strides;
}

void add_projected(Table& acc, const Table& src, double sign) {
  if (!acc.scope().contains(src.scope()))
    throw ValidationError("projection source scope not contained in target");
  Odometer odo(acc, {projection_strides(acc, src)});
  std::size_t i = 0;
  do {
    acc[i++] += sign * src[odo.offset(0)];
  } while (odo.next());
}

Table log_product(std::span<const Table> factors, const CardinalityMap& card) {
  Cluster scope;
  for (const Table& f : factors) scope = set_union(scope, f.scope());
  Table out = make_table(scope, card);
  for (const Table& f : factors) add_projected(out, f);
  return out;
}

namespace {

Table marginal_impl(const Table& t, const Cluster& keep, bool log_scale) {
  if (!t.scope().contains(keep))
    throw ValidationError("marginal target not contained in table scope");
  std::vector<int> dims;
  for (int v : keep.ids())
    dims.push_back(t.card(static_cast<std::size_t>(t.scope().index_of(v))));
  Table out(keep, dims);

  if (log_scale) {
    // Two passes: per-cell max, then shifted accumulation.
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> cell_max(out.size(), neg_inf);
    {
      Odometer odo(t, {projection_strides(t, out)});
      std::size_t i = 0;
      do {
        std::size_t j = odo.offset(0);
        if (t[i] > cell_max[j]) cell_max[j] = t[i];
        ++i;
      } while (odo.next());
    }
    std::vector<double> acc(out.size(), 0.0);
    {
      Odometer odo(t, {projection_strides(t, out)});
      std::size_t i = 0;
      do {
        std::size_t j = odo.offset(0);
        acc[j] += std::exp(t[i] - cell_max[j]);
        ++i;
      } while (odo.next());
    }
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = cell_max[j] + std::log(acc[j]);
  } else {
    Odometer odo(t, {projection_strides(t, out)});
    std::size_t i = 0;
    do {
      out[odo.offset(0)] += t[i++];
    } while (odo.next());
  }
  return out;
}

}  // namespace

Table log_marginal(const Table& t, const Cluster& keep) {
  return marginal_impl(t, keep, true);
}

Table sum_marginal(const Table& t, const Cluster& keep) {
  return marginal_impl(t, keep, false);
}

double logsumexp(const Table& t) {
  double m = max_value(t);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : t.values()) acc += std::exp(v - m);
  return m + std::log(acc);
}

double max_value(const Table& t) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : t.values())
    if (v > m) m = v;
  return m;
}

double max_normalize(Table& t) {
  double m = max_value(t);
  for (double& v : t.values()) v -= m;
  return -m;
}

double log_normalize(Table& t) {
  double z = logsumexp(t);
  for (double& v : t.values()) v -= z;
  return -z;
}

Table slice(const Table& t, const std::map<int, int>& evidence) {
  std::vector<int> kept;
  std::size_t base = 0;
  for (std::size_t i = 0; i < t.scope().size(); ++i) {
    int v = t.scope()[i];
    auto it = evidence.find(v);
    if (it == evidence.end()) {
      kept.push_back(v);
    } else {
      if (it->second < 0 || it->second >= t.card(i))
        throw ValidationError("evidence state " + std::to_string(it->second) +
                              " out of range for variable " +
                              std::to_string(v));
      base += static_cast<std::size_t>(it->second) * t.stride(i);
    }
  }
  std::vector<int> dims;
  for (int v : kept)
    dims.push_back(t.card(static_cast<std::size_t>(t.scope().index_of(v))));
  Table out(Cluster(kept), dims);
  Odometer odo(out, {projection_strides(out, t)});
  std::size_t i = 0;
  do {
    out[i++] = t[base + odo.offset(0)];
  } while (odo.next());
  return out;
}

Table exp_table(const Table& t) {
  Table out = t;
  for (double& v : out.values()) v = std::exp(v);
  return out;
}

Table log_table(const Table& t, double floor) {
  Table out = t;
  for (double& v : out.values()) v = std::log(v < floor ? floor : v);
  return out;
}

double entropy_nats(const Table& prob) {
  double h = 0.0;
  for (double p : prob.values())
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace structmf
