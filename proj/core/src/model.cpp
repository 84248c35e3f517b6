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

#include "structmf/model.hpp"

#include <cmath>
#include <set>
#include <string>

namespace structmf {

std::uint64_t TargetModel::joint_states(std::uint64_t cap) const {
  std::uint64_t n = 1;
  for (const Variable& v : variables) {
    const auto c = static_cast<std::uint64_t>(v.cardinality);
    if (n > cap / c) return cap;
    n *= c;
  }
  return n > cap ? cap : n;
}

void validate_model(const TargetModel& model) {
  const std::size_t n = model.variables.size();
  std::vector<bool> seen(n, false);
  for (const Variable& v : model.variables) {
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= n)
      throw ValidationError("variable id " + std::to_string(v.id) +
                            " out of range for " + std::to_string(n) +
                            " variables");
    if (seen[static_cast<std::size_t>(v.id)])
      throw ValidationError("duplicate variable id " + std::to_string(v.id));
    seen[static_cast<std::size_t>(v.id)] = true;
    if (v.cardinality < 2)
      throw ValidationError("variable " + v.name + " has cardinality " +
                            std::to_string(v.cardinality) + " < 2");
  }
  CardinalityMap card = model.cardinalities();
  std::vector<bool> covered(n, false);
  for (std::size_t f = 0; f < model.factors.size(); ++f) {
    const Table& t = model.factors[f];
    for (std::size_t i = 0; i < t.scope().size(); ++i) {
      int v = t.scope()[i];
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        throw ValidationError("factor " + std::to_string(f) +
                              " references unknown variable " +
                              std::to_string(v));
      if (t.card(i) != card[static_cast<std::size_t>(v)])
        throw ValidationError("factor " + std::to_string(f) +
                              " cardinality mismatch on variable " +
                              std::to_string(v));
      covered[static_cast<std::size_t>(v)] = true;
    }
    for (double x : t.values())
      if (!std::isfinite(x))
        throw ValidationError("factor " + std::to_string(f) +
                              " has a non-finite entry");
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!covered[v])
      throw ValidationError("variable " + std::to_string(v) +
                            " is covered by no factor");
}

TargetModel build_boltzmann(const std::vector<std::vector<double>>& weights,
                            const std::vector<double>& biases,
                            BoltzmannEncoding encoding) {
  const std::size_t n = weights.size();
  if (biases.size() != n)
    throw ValidationError("bias vector length " + std::to_string(biases.size()) +
                          " does not match " + std::to_string(n) + " units");
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i].size() != n)
      throw ValidationError("weight matrix is not square");
    if (weights[i][i] != 0.0)
      throw ValidationError("weight matrix has nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j)
      if (weights[i][j] != weights[j][i])
        throw ValidationError("weight matrix is not symmetric");
  }

  const double lo = encoding == BoltzmannEncoding::kZeroOne ? 0.0 : -1.0;
  const double state_value[2] = {lo, 1.0};

  TargetModel model;
  for (std::size_t i = 0; i < n; ++i)
    model.variables.push_back(
        {static_cast<int>(i), "x" + std::to_string(i), 2});

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (weights[i][j] == 0.0) continue;
      Table t(Cluster{static_cast<int>(i), static_cast<int>(j)}, {2, 2});
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          t[static_cast<std::size_t>(a * 2 + b)] =
              weights[i][j] * state_value[a] * state_value[b];
      model.factors.push_back(std::move(t));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    Table t(Cluster{static_cast<int>(k)}, {2});
    t[0] = biases[k] * state_value[0];
    t[1] = biases[k] * state_value[1];
    model.factors.push_back(std::move(t));
  }
  return model;
}

namespace {

void check_acyclic(std::size_t n, const std::vector<Cpt>& cpts) {
  std::vector<std::vector<int>> children(n);
  std::vector<int> indegree(n, 0);
  for (const Cpt& c : cpts) {
    for (int p : c.parents) {
      children[static_cast<std::size_t>(p)].push_back(c.child);
      ++indegree[static_cast<std::size_t>(c.child)];
    }
  }
  std::vector<int> frontier;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) frontier.push_back(static_cast<int>(v));
  std::size_t processed = 0;
  while (!frontier.empty()) {
    int v = frontier.back();
    frontier.pop_back();
    ++processed;
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) frontier.push_back(c);
  }
  if (processed != n)
    throw ValidationError("parent structure contains a cycle");
}

}  // namespace

TargetModel bayesian_network_to_target(std::vector<Variable> variables,
                                       const std::vector<Cpt>& cpts) {
  TargetModel model;
  model.variables = std::move(variables);
  const std::size_t n = model.variables.size();
  CardinalityMap card = model.cardinalities();

  std::vector<bool> has_cpt(n, false);
  for (const Cpt& c : cpts) {
    if (c.child < 0 || static_cast<std::size_t>(c.child) >= n)
      throw ValidationError("CPT child id out of range");
    if (has_cpt[static_cast<std::size_t>(c.child)])
      throw ValidationError("variable " + std::to_string(c.child) +
                            " has two CPTs");
    has_cpt[static_cast<std::size_t>(c.child)] = true;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!has_cpt[v])
      throw ValidationError("variable " + std::to_string(v) + " has no CPT");
  check_acyclic(n, cpts);

  for (const Cpt& c : cpts) {
    const int child_card = card[static_cast<std::size_t>(c.child)];
    std::size_t rows = 1;
    for (int p : c.parents) {
      if (p < 0 || static_cast<std::size_t>(p) >= n)
        throw ValidationError("CPT parent id out of range");
      rows *= static_cast<std::size_t>(card[static_cast<std::size_t>(p)]);
    }
    if (c.probs.size() != rows * static_cast<std::size_t>(child_card))
      throw ValidationError("CPT for variable " + std::to_string(c.child) +
                            " has " + std::to_string(c.probs.size()) +
                            " entries, expected " +
                            std::to_string(rows * child_card));
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int k = 0; k < child_card; ++k)
        s += c.probs[r * static_cast<std::size_t>(child_card) +
                     static_cast<std::size_t>(k)];
      if (std::abs(s - 1.0) > 1e-12)
        throw ValidationError("CPT row " + std::to_string(r) +
                              " for variable " + std::to_string(c.child) +
                              " sums to " + std::to_string(s));
    }

    Cluster scope = set_union(Cluster(c.parents), Cluster{c.child});
    Table t = make_table(scope, card);
    // Walk the CPT's own layout and scatter into the sorted-scope table.
    std::vector<int> cpt_vars = c.parents;
    cpt_vars.push_back(c.child);
    std::vector<int> state(cpt_vars.size(), 0);
    std::vector<int> scope_state(scope.size(), 0);
    for (std::size_t flat = 0; flat < c.probs.size(); ++flat) {
      for (std::size_t i = 0; i < cpt_vars.size(); ++i) {
        int pos = scope.index_of(cpt_vars[i]);
        scope_state[static_cast<std::size_t>(pos)] = state[i];
      }
      double p = c.probs[flat];
      t[t.flat_index(scope_state)] = std::log(p < kProbFloor ? kProbFloor : p);
      for (std::size_t i = cpt_vars.size(); i-- > 0;) {
        int c_i = card[static_cast<std::size_t>(cpt_vars[i])];
        if (++state[i] < c_i) break;
        state[i] = 0;
      }
    }
    model.factors.push_back(std::move(t));
  }
  model.log_z = 0.0;
  return model;
}

EvidenceResult absorb_evidence(const TargetModel& model,
                               const std::map<int, int>& evidence) {
  const std::size_t n = model.variables.size();
  CardinalityMap card = model.cardinalities();
  for (const auto& [v, s] : evidence) {
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw ValidationError("evidence on unknown variable " +
                            std::to_string(v));
    if (s < 0 || s >= card[static_cast<std::size_t>(v)])
      throw ValidationError("evidence state " + std::to_string(s) +
                            " out of range for variable " + std::to_string(v));
  }

  EvidenceResult result;
  result.old_to_new.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (evidence.count(static_cast<int>(v))) continue;
    result.old_to_new[v] = static_cast<int>(result.new_to_old.size());
    result.new_to_old.push_back(static_cast<int>(v));
  }

  for (int old_id : result.new_to_old) {
    Variable v = model.variables[static_cast<std::size_t>(old_id)];
    v.id = result.old_to_new[static_cast<std::size_t>(old_id)];
    result.model.variables.push_back(std::move(v));
  }

  for (const Table& f : model.factors) {
    Table sliced = slice(f, evidence);
    std::vector<int> renamed;
    renamed.reserve(sliced.scope().size());
    for (int v : sliced.scope().ids())
      renamed.push_back(result.old_to_new[static_cast<std::size_t>(v)]);
    std::vector<double> vals = sliced.values();
    std::vector<int> dims;
    for (std::size_t i = 0; i < sliced.scope().size(); ++i)
      dims.push_back(sliced.card(i));
    // Re-densification preserves relative order, so the layout is unchanged.
    result.model.factors.emplace_back(Cluster(renamed), std::move(dims),
                                      std::move(vals));
  }
  result.model.log_z = std::nullopt;
  return result;
}

double unnormalized_log_score(const TargetModel& model, const Assignment& x) {
  if (x.states.size() != model.variables.size())
    throw ValidationError("assignment arity mismatch");
  CardinalityMap card = model.cardinalities();
  for (std::size_t v = 0; v < x.states.size(); ++v)
    if (x.states[v] < 0 || x.states[v] >= card[v])
      throw ValidationError("assignment state out of range for variable " +
                            std::to_string(v));
  double s = 0.0;
  for (const Table& f : model.factors) s += f.at_assignment(x);
  return s;
}

}  // namespace structmf
