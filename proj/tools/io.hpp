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

#ifndef STRUCTMF_TOOLS_IO_HPP_
#define STRUCTMF_TOOLS_IO_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "structmf/hybrid.hpp"
#include "structmf/junction_tree.hpp"
#include "structmf/model.hpp"

namespace structmf::tools {

/// Whole file as a string. ParseError when the file cannot be read.
std::string read_file(const std::string& path);

/// A model document plus the evidence it carried, kept separate so the
/// caller decides when to absorb it.
struct ParsedModel {
  TargetModel model;
  std::map<int, int> evidence;
};

/// Model document:
///   {"variables": [{"name": ..., "cardinality": ...}, ...],
///    "factors": [{"scope": [ids], "logvalues": [...]}, ...],
///    "log_z": number?, "evidence": {"id": state, ...}?}
/// Variable ids are positions in the variables array. Scopes must be
/// strictly increasing; logvalues are laid out with the last scope variable
/// fastest. Variables no factor mentions get a zero unary factor so sparse
/// documents stay valid. Diagnostics name the offending field; syntax
/// errors carry line and column.
ParsedModel parse_model_json(const std::string& text);

/// Inverse of parse_model_json for the model part (evidence optional).
/// Doubles are printed with enough digits to round-trip bit-exactly.
std::string serialize_model(const TargetModel& model,
                            const std::map<int, int>& evidence = {});

/// Approximation structure document; which fields apply depends on the
/// method. Cluster form: {"clusters": [[ids], ...],
/// "copied_factors": [indices]?, "ordering": [cluster positions]?}.
/// Explicit tree form: {"nodes": [[ids], ...], "edges": [[a, b], ...]}.
struct StructureSpec {
  std::vector<Cluster> clusters;
  std::vector<int> copied_factors;
  std::vector<int> ordering;          // empty when absent
  bool has_ordering = false;
  std::optional<TreeStructure> tree;  // set when nodes/edges given
};
StructureSpec parse_structure_json(const std::string& text);

/// Mixture-with-observation document:
///   {"p_t": [...], "gaussians": [{"mean": ..., "var": ...}, ...],
///    "sigmoid": {"w": ..., "b": ...}, "observed_r": 0 or 1}
HybridModel parse_hybrid_json(const std::string& text);

std::string serialize_hybrid(const HybridModel& m);

/// 17 significant digits, enough for every double to round-trip exactly.
/// Used for structured output and serialization.
std::string fmt_exact(double v);

/// Fixed 15 significant digits. Used for tabular output columns.
std::string fmt_table(double v);

}  // namespace structmf::tools

#endif  // STRUCTMF_TOOLS_IO_HPP_
