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

#ifndef STRUCTMF_TYPES_HPP_
#define STRUCTMF_TYPES_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "structmf/errors.hpp"

namespace structmf {

/// A discrete variable with states 0..cardinality-1. Ids are dense (0..n-1)
/// within a model.
struct Variable {
  int id = 0;
  std::string name;
  int cardinality = 2;
};

/// A sorted set of variable ids. Used for potential scopes, separators and
/// marginal targets. Empty clusters are legal (scalar scopes, empty
/// separators); contexts that require non-empty scopes check for themselves.
class Cluster {
 public:
  Cluster() = default;

  /// Canonicalizes to strictly ascending order; duplicates are an error.
  explicit Cluster(std::vector<int> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
      throw ValidationError("duplicate variable id in cluster");
    if (!ids_.empty() && ids_.front() < 0)
      throw ValidationError("negative variable id in cluster");
  }

  Cluster(std::initializer_list<int> ids) : Cluster(std::vector<int>(ids)) {}

  const std::vector<int>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  int operator[](std::size_t i) const { return ids_[i]; }

  bool contains(int v) const {
    return std::binary_search(ids_.begin(), ids_.end(), v);
  }
  bool contains(const Cluster& other) const {
    return std::includes(ids_.begin(), ids_.end(), other.ids_.begin(),
                         other.ids_.end());
  }
  bool intersects(const Cluster& other) const {
    auto a = ids_.begin();
    auto b = other.ids_.begin();
    while (a != ids_.end() && b != other.ids_.end()) {
      if (*a < *b)
        ++a;
      else if (*b < *a)
        ++b;
      else
        return true;
    }
    return false;
  }

  /// Position of variable v within the sorted scope, or -1.
  int index_of(int v) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    if (it == ids_.end() || *it != v) return -1;
    return static_cast<int>(it - ids_.begin());
  }

  friend Cluster set_union(const Cluster& a, const Cluster& b) {
    Cluster r;
    std::set_union(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                   std::back_inserter(r.ids_));
    return r;
  }
  friend Cluster set_intersection(const Cluster& a, const Cluster& b) {
    Cluster r;
    std::set_intersection(a.ids_.begin(), a.ids_.end(), b.ids_.begin(),
                          b.ids_.end(), std::back_inserter(r.ids_));
    return r;
  }
  friend Cluster set_difference(const Cluster& a, const Cluster& b) {
    Cluster r;
    std::set_difference(a.ids_.begin(), a.ids_.end(), b.ids_.begin(),
                        b.ids_.end(), std::back_inserter(r.ids_));
    return r;
  }

  bool operator==(const Cluster& other) const { return ids_ == other.ids_; }
  bool operator!=(const Cluster& other) const { return ids_ != other.ids_; }
  bool operator<(const Cluster& other) const { return ids_ < other.ids_; }

 private:
  std::vector<int> ids_;
};

/// A full joint state: one state index per variable id.
struct Assignment {
  std::vector<int> states;
};

}  // namespace structmf

#endif  // STRUCTMF_TYPES_HPP_
