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

#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "structmf/errors.hpp"

namespace structmf::tools {

namespace {

using nlohmann::json;

// 1-based line and column of a byte offset, for syntax diagnostics.
std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("not valid JSON (" + line_col(text, e.byte) + "): " +
                     e.what());
  }
}

// Field accessors that convert json.hpp type errors into diagnostics that
// name the field.
const json& require(const json& j, const char* field, const char* where) {
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(std::string(where) + ": missing field '" + field + "'");
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number())
    throw ParseError(where + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    throw ParseError(where + ": expected an integer");
  return j.get<int>();
}

std::vector<int> as_int_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_int(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> as_number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ParsedModel parse_model_json(const std::string& text) {
  json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("top level: expected an object");

  ParsedModel out;
  const json& vars = require(doc, "variables", "top level");
  if (!vars.is_array() || vars.empty())
    throw ParseError("variables: expected a non-empty array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::string where = "variables[" + std::to_string(i) + "]";
    if (!vars[i].is_object()) throw ParseError(where + ": expected an object");
    Variable v;
    v.id = static_cast<int>(i);
    const json& name = require(vars[i], "name", where.c_str());
    if (!name.is_string()) throw ParseError(where + ".name: expected a string");
    v.name = name.get<std::string>();
    v.cardinality =
        as_int(require(vars[i], "cardinality", where.c_str()), where + ".cardinality");
    out.model.variables.push_back(std::move(v));
  }
  CardinalityMap card(out.model.variables.size(), 0);
  for (const Variable& v : out.model.variables) {
    if (v.cardinality < 2)
      throw ValidationError("variables[" + std::to_string(v.id) +
                            "]: cardinality must be at least 2");
    card[static_cast<std::size_t>(v.id)] = v.cardinality;
  }
  int n = static_cast<int>(card.size());

  const json& factors = require(doc, "factors", "top level");
  if (!factors.is_array()) throw ParseError("factors: expected an array");
  std::vector<bool> covered(card.size(), false);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    std::string where = "factors[" + std::to_string(i) + "]";
    if (!factors[i].is_object()) throw ParseError(where + ": expected an object");
    std::vector<int> scope =
        as_int_array(require(factors[i], "scope", where.c_str()), where + ".scope");
    if (scope.empty()) throw ValidationError(where + ".scope: must be non-empty");
    std::size_t expected = 1;
    for (std::size_t k = 0; k < scope.size(); ++k) {
      int v = scope[k];
      if (v < 0 || v >= n)
        throw ValidationError(where + ".scope: variable " + std::to_string(v) +
                              " out of range");
      if (k > 0 && scope[k] <= scope[k - 1])
        throw ValidationError(where + ".scope: must be strictly increasing");
      expected *= static_cast<std::size_t>(card[static_cast<std::size_t>(v)]);
      covered[static_cast<std::size_t>(v)] = true;
    }
    std::vector<double> values = as_number_array(
        require(factors[i], "logvalues", where.c_str()), where + ".logvalues");
    if (values.size() != expected)
      throw ValidationError(where + ".logvalues: expected " +
                            std::to_string(expected) + " entries, got " +
                            std::to_string(values.size()));
    std::vector<int> dims;
    for (int v : scope) dims.push_back(card[static_cast<std::size_t>(v)]);
    out.model.factors.push_back(Table(Cluster(scope), dims, values));
  }
  // Sparse documents may omit variables from every scope; a zero unary
  // factor keeps them uniform and the model fully covered.
  for (int v = 0; v < n; ++v) {
    if (covered[static_cast<std::size_t>(v)]) continue;
    Table t(Cluster{v}, {card[static_cast<std::size_t>(v)]});
    out.model.factors.push_back(std::move(t));
  }

  if (auto it = doc.find("log_z"); it != doc.end())
    out.model.log_z = as_number(*it, "log_z");

  if (auto it = doc.find("evidence"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("evidence: expected an object");
    for (const auto& [key, value] : it->items()) {
      int var;
      try {
        std::size_t pos = 0;
        var = std::stoi(key, &pos);
        if (pos != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ParseError("evidence: key '" + key +
                         "' is not a variable id");
      }
      if (var < 0 || var >= n)
        throw ValidationError("evidence: variable " + std::to_string(var) +
                              " out of range");
      int state = as_int(value, "evidence['" + key + "']");
      if (state < 0 || state >= card[static_cast<std::size_t>(var)])
        throw ValidationError("evidence['" + key + "']: state " +
                              std::to_string(state) + " out of range");
      out.evidence[var] = state;
    }
  }

  validate_model(out.model);
  return out;
}

std::string serialize_model(const TargetModel& model,
                            const std::map<int, int>& evidence) {
  std::string out = "{\n  \"variables\": [\n";
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    out += "    {\"name\": ";
    append_escaped(out, model.variables[i].name);
    out += ", \"cardinality\": " +
           std::to_string(model.variables[i].cardinality) + "}";
    out += i + 1 < model.variables.size() ? ",\n" : "\n";
  }
  out += "  ],\n  \"factors\": [\n";
  for (std::size_t i = 0; i < model.factors.size(); ++i) {
    const Table& t = model.factors[i];
    out += "    {\"scope\": [";
    const auto& ids = t.scope().ids();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      out += std::to_string(ids[k]);
      if (k + 1 < ids.size()) out += ", ";
    }
    out += "], \"logvalues\": [";
    for (std::size_t k = 0; k < t.size(); ++k) {
      out += fmt_exact(t[k]);
      if (k + 1 < t.size()) out += ", ";
    }
    out += "]}";
    out += i + 1 < model.factors.size() ? ",\n" : "\n";
  }
  out += "  ]";
  if (model.log_z) out += ",\n  \"log_z\": " + fmt_exact(*model.log_z);
  if (!evidence.empty()) {
    out += ",\n  \"evidence\": {";
    bool first = true;
    for (const auto& [var, state] : evidence) {
      if (!first) out += ", ";
      first = false;
      out += "\"" + std::to_string(var) + "\": " + std::to_string(state);
    }
    out += "}";
  }
  out += "\n}\n";
  return out;
}

StructureSpec parse_structure_json(const std::string& text) {
  json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("top level: expected an object");
  StructureSpec out;

  bool has_clusters = doc.contains("clusters");
  bool has_tree = doc.contains("nodes") || doc.contains("edges");
  if (!has_clusters && !has_tree)
    throw ParseError("top level: expected 'clusters' or 'nodes'/'edges'");

  auto parse_cluster_list = [&](const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
      throw ParseError(where + ": expected a non-empty array");
    std::vector<Cluster> list;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string w = where + "[" + std::to_string(i) + "]";
      std::vector<int> ids = as_int_array(arr[i], w);
      if (ids.empty()) throw ValidationError(w + ": must be non-empty");
      for (std::size_t k = 1; k < ids.size(); ++k)
        if (ids[k] <= ids[k - 1])
          throw ValidationError(w + ": must be strictly increasing");
      if (ids.front() < 0)
        throw ValidationError(w + ": negative variable id");
      list.push_back(Cluster(ids));
    }
    return list;
  };

  if (has_clusters)
    out.clusters = parse_cluster_list(doc["clusters"], "clusters");

  if (has_tree) {
    TreeStructure t;
    t.nodes = parse_cluster_list(require(doc, "nodes", "top level"), "nodes");
    const json& edges = require(doc, "edges", "top level");
    if (!edges.is_array()) throw ParseError("edges: expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      std::string w = "edges[" + std::to_string(i) + "]";
      std::vector<int> pair = as_int_array(edges[i], w);
      if (pair.size() != 2)
        throw ValidationError(w + ": expected [node, node]");
      for (int node : pair)
        if (node < 0 || static_cast<std::size_t>(node) >= t.nodes.size())
          throw ValidationError(w + ": node " + std::to_string(node) +
                                " out of range");
      t.edges.emplace_back(pair[0], pair[1]);
    }
    // The node list doubles as a cluster list so every method can consume
    // a tree document.
    if (!has_clusters) out.clusters = t.nodes;
    out.tree = std::move(t);
  }

  if (auto it = doc.find("copied_factors"); it != doc.end())
    out.copied_factors = as_int_array(*it, "copied_factors");

  if (auto it = doc.find("ordering"); it != doc.end()) {
    out.ordering = as_int_array(*it, "ordering");
    out.has_ordering = true;
    std::size_t m = out.clusters.size();
    std::vector<bool> seen(m, false);
    if (out.ordering.size() != m)
      throw ValidationError("ordering: expected " + std::to_string(m) +
                            " entries, one per cluster");
    for (int v : out.ordering) {
      if (v < 0 || static_cast<std::size_t>(v) >= m ||
          seen[static_cast<std::size_t>(v)])
        throw ValidationError(
            "ordering: must be a permutation of the cluster positions");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
  return out;
}

HybridModel parse_hybrid_json(const std::string& text) {
  json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("top level: expected an object");
  HybridModel m;
  m.mixture = as_number_array(require(doc, "p_t", "top level"), "p_t");
  const json& gs = require(doc, "gaussians", "top level");
  if (!gs.is_array()) throw ParseError("gaussians: expected an array");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    std::string where = "gaussians[" + std::to_string(i) + "]";
    if (!gs[i].is_object()) throw ParseError(where + ": expected an object");
    m.means.push_back(
        as_number(require(gs[i], "mean", where.c_str()), where + ".mean"));
    m.variances.push_back(
        as_number(require(gs[i], "var", where.c_str()), where + ".var"));
  }
  const json& sg = require(doc, "sigmoid", "top level");
  if (!sg.is_object()) throw ParseError("sigmoid: expected an object");
  m.w = as_number(require(sg, "w", "sigmoid"), "sigmoid.w");
  m.b = as_number(require(sg, "b", "sigmoid"), "sigmoid.b");
  m.observed = as_int(require(doc, "observed_r", "top level"), "observed_r");
  validate_hybrid(m);
  return m;
}

std::string serialize_hybrid(const HybridModel& m) {
  std::string out = "{\n  \"p_t\": [";
  for (std::size_t t = 0; t < m.mixture.size(); ++t) {
    out += fmt_exact(m.mixture[t]);
    if (t + 1 < m.mixture.size()) out += ", ";
  }
  out += "],\n  \"gaussians\": [\n";
  for (std::size_t t = 0; t < m.means.size(); ++t) {
    out += "    {\"mean\": " + fmt_exact(m.means[t]) +
           ", \"var\": " + fmt_exact(m.variances[t]) + "}";
    out += t + 1 < m.means.size() ? ",\n" : "\n";
  }
  out += "  ],\n  \"sigmoid\": {\"w\": " + fmt_exact(m.w) +
         ", \"b\": " + fmt_exact(m.b) + "},\n  \"observed_r\": " +
         std::to_string(m.observed) + "\n}\n";
  return out;
}

std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_table(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace structmf::tools
