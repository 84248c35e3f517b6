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

#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "io.hpp"
#include "structmf/brute_force.hpp"
#include "structmf/directed_mf.hpp"
#include "structmf/errors.hpp"
#include "structmf/hybrid.hpp"
#include "structmf/jt_approx.hpp"
#include "structmf/junction_tree.hpp"
#include "structmf/mean_field.hpp"
#include "structmf/model.hpp"
#include "structmf/random_models.hpp"
#include "structmf/rng.hpp"
#include "structmf/sigmoid_bound.hpp"
#include "structmf/table.hpp"
#include "structmf/types.hpp"

namespace structmf::tools {
namespace {

Schedule::Kind parse_schedule_kind(const std::string& name) {
  if (name == "sequential") return Schedule::Kind::kSequential;
  if (name == "reverse") return Schedule::Kind::kReverse;
  if (name == "random") return Schedule::Kind::kRandom;
  throw ValidationError("unknown schedule '" + name +
                        "' (expected sequential, reverse, or random)");
}

void validate_config(const RunConfig& config) {
  if (config.format != "tabular" && config.format != "structured") {
    throw ValidationError("unknown format '" + config.format +
                          "' (expected tabular or structured)");
  }
  if (!(config.tol > 0.0)) throw ValidationError("tol must be positive");
  if (config.max_iters < 1) throw ValidationError("max-iters must be >= 1");
  if (config.restarts < 0) throw ValidationError("restarts must be >= 0");
  parse_schedule_kind(config.schedule);
}

ParsedModel load_model(const RunConfig& config) {
  if (config.model_path.empty()) {
    throw ValidationError("this command needs --model");
  }
  return parse_model_json(read_file(config.model_path));
}

std::optional<StructureSpec> load_structure(const RunConfig& config) {
  if (config.structure_path.empty()) return std::nullopt;
  return parse_structure_json(read_file(config.structure_path));
}

// The model the methods actually run on. When the document carries evidence
// the observed variables are sliced out first and all reporting maps the
// surviving ids back to the document's numbering.
struct WorkingModel {
  ParsedModel parsed;
  TargetModel model;  // evidence absorbed
  std::optional<EvidenceResult> evidence;

  int original_count() const {
    return static_cast<int>(parsed.model.variables.size());
  }
};

WorkingModel prepare_model(const RunConfig& config) {
  WorkingModel w{load_model(config), {}, std::nullopt};
  if (w.parsed.evidence.empty()) {
    w.model = w.parsed.model;
  } else {
    w.evidence = absorb_evidence(w.parsed.model, w.parsed.evidence);
    w.model = w.evidence->model;
  }
  return w;
}

std::vector<Cluster> singleton_clusters(int n_vars) {
  std::vector<Cluster> out;
  out.reserve(static_cast<std::size_t>(n_vars));
  for (int v = 0; v < n_vars; ++v) out.push_back(Cluster({v}));
  return out;
}

// Rewrites document-numbered clusters into the absorbed model's numbering.
// Observed variables are dropped from every cluster; clusters that become
// empty are removed, and an ordering over the original cluster list is
// filtered down to the survivors.
struct RemappedStructure {
  std::vector<Cluster> clusters;
  std::vector<int> ordering;
  bool has_ordering = false;
};

RemappedStructure remap_structure(const StructureSpec& spec,
                                  const WorkingModel& w) {
  RemappedStructure out;
  std::vector<int> survivor;  // original cluster index -> new index or -1
  survivor.assign(spec.clusters.size(), -1);
  for (std::size_t i = 0; i < spec.clusters.size(); ++i) {
    const Cluster& c = spec.clusters[i];
    std::vector<int> ids;
    for (int k = 0; k < c.size(); ++k) {
      int v = c[k];
      if (v < 0 || v >= w.original_count()) {
        throw ValidationError("structure cluster " + std::to_string(i) +
                              " references unknown variable " +
                              std::to_string(v));
      }
      int mapped = w.evidence ? w.evidence->old_to_new[v] : v;
      if (mapped >= 0) ids.push_back(mapped);
    }
    if (ids.empty()) continue;
    survivor[i] = static_cast<int>(out.clusters.size());
    out.clusters.push_back(Cluster(ids));
  }
  if (out.clusters.empty()) {
    throw ValidationError(
        "every structure cluster was emptied by evidence absorption");
  }
  if (spec.has_ordering) {
    out.has_ordering = true;
    for (int idx : spec.ordering) {
      if (survivor[idx] >= 0) out.ordering.push_back(survivor[idx]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifact assembly.

void put_comment(std::string& out, const char* key, const std::string& value) {
  out += "# ";
  out += key;
  out += ' ';
  out += value;
  out += '\n';
}

void put_comment(std::string& out, const char* key, double value) {
  put_comment(out, key, fmt_table(value));
}

void put_comment(std::string& out, const char* key, int value) {
  put_comment(out, key, std::to_string(value));
}

std::string json_number_array(const std::vector<double>& v,
                              std::string (*fmt)(double) = fmt_exact) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  out += "]";
  return out;
}

// Per-variable probability vectors in the numbering of the input document.
// Observed variables report a point mass at their observed state.
std::vector<std::vector<double>> marginals_by_document_variable(
    const CompiledTree& tree, const WorkingModel& w) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(w.original_count()));
  for (int v = 0; v < w.original_count(); ++v) {
    int card = w.parsed.model.variables[static_cast<std::size_t>(v)].cardinality;
    int mapped = w.evidence ? w.evidence->old_to_new[v] : v;
    std::vector<double> probs(static_cast<std::size_t>(card), 0.0);
    if (mapped < 0) {
      probs[static_cast<std::size_t>(w.parsed.evidence.at(v))] = 1.0;
    } else {
      Table m = tree.marginal(Cluster({mapped}));
      for (int s = 0; s < card; ++s) {
        probs[static_cast<std::size_t>(s)] = m.values()[static_cast<std::size_t>(s)];
      }
    }
    out.push_back(std::move(probs));
  }
  return out;
}

void put_marginal_rows(std::string& out,
                       const std::vector<std::vector<double>>& marginals) {
  out += "variable state probability\n";
  for (std::size_t v = 0; v < marginals.size(); ++v) {
    for (std::size_t s = 0; s < marginals[v].size(); ++s) {
      out += std::to_string(v);
      out += ' ';
      out += std::to_string(s);
      out += ' ';
      out += fmt_table(marginals[v][s]);
      out += '\n';
    }
  }
}

std::string json_marginals(const std::vector<std::vector<double>>& marginals) {
  std::string out = "[\n";
  for (std::size_t v = 0; v < marginals.size(); ++v) {
    out += "        {\"variable\": " + std::to_string(v) +
           ", \"probabilities\": " + json_number_array(marginals[v]) + "}";
    out += (v + 1 < marginals.size()) ? ",\n" : "\n";
  }
  out += "    ]";
  return out;
}

// ---------------------------------------------------------------------------
// exact

std::string run_exact(const RunConfig& config) {
  WorkingModel w = prepare_model(config);
  CompiledTree tree = compile_model_tree(w.model);
  auto marginals = marginals_by_document_variable(tree, w);
  std::string out;
  if (config.format == "structured") {
    out += "{\n";
    out += "    \"command\": \"exact\",\n";
    out += "    \"log_z\": " + fmt_exact(tree.log_z()) + ",\n";
    out += "    \"marginals\": " + json_marginals(marginals) + "\n";
    out += "}\n";
  } else {
    put_comment(out, "command", std::string("exact"));
    put_comment(out, "log_z", tree.log_z());
    put_marginal_rows(out, marginals);
  }
  return out;
}

// ---------------------------------------------------------------------------
// mf / dmf / jtmf

struct FitResult {
  CompiledTree tree;
  DescentReport report;
  double free_energy = 0.0;
};

OptimizeOptions fit_options(const RunConfig& config, int attempt) {
  OptimizeOptions opts;
  opts.schedule.kind = parse_schedule_kind(config.schedule);
  // Distinct seeds keep random-schedule restarts from replaying each other.
  opts.schedule.seed = config.seed + static_cast<std::uint64_t>(attempt);
  opts.tol = config.tol;
  opts.max_sweeps = config.max_iters;
  return opts;
}

FitResult fit_undirected(const RunConfig& config, const TargetModel& p,
                         std::vector<Cluster> clusters,
                         std::vector<int> copied) {
  FitResult best;
  double best_fe = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    UndirectedApprox q = make_undirected_approx(p, clusters, copied);
    if (attempt > 0) seed_variational(q, config.seed + static_cast<std::uint64_t>(attempt));
    DescentReport rep = optimize(q, p, fit_options(config, attempt));
    double fe = rep.fe_trace.back();
    if (fe < best_fe) {
      best_fe = fe;
      best = FitResult{std::move(q.q_tree), std::move(rep), fe};
    }
  }
  return best;
}

FitResult fit_directed(const RunConfig& config, const TargetModel& p,
                       std::vector<Cluster> clusters) {
  FitResult best;
  double best_fe = std::numeric_limits<double>::infinity();
  // The directed family starts from its single canonical (uniform) state, so
  // restarts only matter under the random schedule, where the seed varies.
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    DirectedApprox q = make_directed_approx(p, clusters);
    DescentReport rep = directed_optimize(q, p, fit_options(config, attempt));
    double fe = rep.fe_trace.back();
    if (fe < best_fe) {
      best_fe = fe;
      best = FitResult{std::move(q.q_tree), std::move(rep), fe};
    }
  }
  return best;
}

FitResult fit_junction_tree(const RunConfig& config, const TargetModel& p,
                            const StructureSpec* spec,
                            const std::vector<Cluster>& clusters) {
  FitResult best;
  double best_fe = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    JunctionTreeApprox q = (spec && spec->tree)
                               ? make_jt_approx(p, *spec->tree)
                               : make_jt_approx(p, clusters);
    DescentReport rep = jt_optimize(q, p, fit_options(config, attempt));
    double fe = rep.fe_trace.back();
    if (fe < best_fe) {
      best_fe = fe;
      best = FitResult{to_compiled_tree(q), std::move(rep), fe};
    }
  }
  return best;
}

void run_fit_command(const RunConfig& config, RunResult* result) {
  WorkingModel w = prepare_model(config);
  std::optional<StructureSpec> spec = load_structure(config);

  if (spec && w.evidence && spec->tree) {
    throw ValidationError(
        "evidence absorption cannot be combined with an explicit tree "
        "structure; list clusters instead");
  }
  if (spec && !spec->copied_factors.empty() && config.command != "mf") {
    throw ValidationError("copied factors are only supported by mf");
  }

  int n_vars = static_cast<int>(w.model.variables.size());
  std::vector<Cluster> clusters;
  std::vector<int> copied;
  std::vector<int> ordering;
  bool has_ordering = false;
  if (spec && !spec->clusters.empty()) {
    RemappedStructure rs = remap_structure(*spec, w);
    clusters = std::move(rs.clusters);
    ordering = std::move(rs.ordering);
    has_ordering = rs.has_ordering;
    copied = spec->copied_factors;
  } else {
    clusters = singleton_clusters(n_vars);
  }
  if (has_ordering) {
    std::vector<Cluster> reordered;
    reordered.reserve(clusters.size());
    for (int idx : ordering) {
      reordered.push_back(clusters[static_cast<std::size_t>(idx)]);
    }
    clusters = std::move(reordered);
  }

  FitResult fit;
  if (config.command == "mf") {
    fit = fit_undirected(config, w.model, clusters, copied);
  } else if (config.command == "dmf") {
    if (spec && !spec->clusters.empty() && !has_ordering) {
      throw ValidationError(
          "the directed method needs an 'ordering' in the structure file");
    }
    fit = fit_directed(config, w.model, clusters);
  } else {
    fit = fit_junction_tree(config, w.model, spec ? &*spec : nullptr, clusters);
  }

  // The exact oracle is optional; wide or huge models just skip these lines.
  std::optional<double> kl;
  std::optional<EventBound> event;
  try {
    double v = kl_divergence(fit.tree, w.model, KlMode::kExact);
    kl = std::max(v, 0.0);
    event = whittaker_event_bound(fit.tree, w.model, *kl);
  } catch (const TractabilityError&) {
  } catch (const StateCapError&) {
  }

  auto marginals = marginals_by_document_variable(fit.tree, w);
  std::string out;
  if (config.format == "structured") {
    out += "{\n";
    out += "    \"command\": \"" + config.command + "\",\n";
    out += std::string("    \"converged\": ") +
           (fit.report.converged ? "true" : "false") + ",\n";
    out += "    \"sweeps\": " + std::to_string(fit.report.sweeps) + ",\n";
    out += "    \"updates\": " + std::to_string(fit.report.updates) + ",\n";
    out += "    \"free_energy\": " + fmt_exact(fit.free_energy) + ",\n";
    if (kl) {
      out += "    \"kl\": " + fmt_exact(*kl) + ",\n";
      out += "    \"event_bound\": {\"max_discrepancy\": " +
             fmt_exact(event->max_discrepancy) +
             ", \"bound\": " + fmt_exact(event->bound) + "},\n";
    }
    out += "    \"marginals\": " + json_marginals(marginals) + ",\n";
    out += "    \"fe_trace\": " + json_number_array(fit.report.fe_trace) + "\n";
    out += "}\n";
  } else {
    put_comment(out, "command", config.command);
    put_comment(out, "converged", fit.report.converged ? 1 : 0);
    put_comment(out, "sweeps", fit.report.sweeps);
    put_comment(out, "updates", fit.report.updates);
    put_comment(out, "free_energy", fit.free_energy);
    if (kl) {
      put_comment(out, "kl", *kl);
      put_comment(out, "event_discrepancy", event->max_discrepancy);
      put_comment(out, "event_bound", event->bound);
      put_comment(out, "event_margin", event->bound - event->max_discrepancy);
    }
    put_marginal_rows(out, marginals);
    out += "\nupdate free_energy\n";
    for (std::size_t i = 0; i < fit.report.fe_trace.size(); ++i) {
      out += std::to_string(i);
      out += ' ';
      out += fmt_table(fit.report.fe_trace[i]);
      out += '\n';
    }
  }
  result->artifact = std::move(out);
  if (!fit.report.converged) {
    result->exit_code = 4;
    result->message = config.command + " did not converge within " +
                      std::to_string(config.max_iters) +
                      " sweeps (last sweep still moved " +
                      fmt_table(fit.report.final_sup_change) + ")";
  }
}

// ---------------------------------------------------------------------------
// hybrid

struct HybridQuadrature {
  double p_observed = 0.0;
  std::vector<double> component_posterior;  // P(t | observation)
  double lo = 0.0;
  double hi = 0.0;
};

double mixture_density(const HybridPosterior& q, double x) {
  double total = 0.0;
  for (std::size_t t = 0; t < q.weights.size(); ++t) {
    double d = x - q.means[t];
    total += q.weights[t] *
             std::exp(-0.5 * d * d / q.variances[t]) /
             std::sqrt(2.0 * M_PI * q.variances[t]);
  }
  return total;
}

HybridQuadrature integrate_observation(const HybridModel& m) {
  HybridQuadrature quad;
  double lo = m.means[0];
  double hi = m.means[0];
  double sigma = 0.0;
  for (std::size_t t = 0; t < m.means.size(); ++t) {
    lo = std::min(lo, m.means[t]);
    hi = std::max(hi, m.means[t]);
    sigma = std::max(sigma, std::sqrt(m.variances[t]));
  }
  quad.lo = lo - 12.0 * sigma;
  quad.hi = hi + 12.0 * sigma;

  const int n = 200000;  // trapezoid intervals; fast and far below tolerance
  double step = (quad.hi - quad.lo) / n;
  double sign = (m.observed == 1) ? 1.0 : -1.0;
  quad.component_posterior.assign(m.mixture.size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    double x = quad.lo + step * static_cast<double>(i);
    double weight = (i == 0 || i == n) ? 0.5 : 1.0;
    double lik = std::exp(log_sigmoid(sign * (m.w * x + m.b)));
    for (std::size_t t = 0; t < m.mixture.size(); ++t) {
      double d = x - m.means[t];
      double gauss = std::exp(-0.5 * d * d / m.variances[t]) /
                     std::sqrt(2.0 * M_PI * m.variances[t]);
      quad.component_posterior[t] += weight * m.mixture[t] * gauss * lik;
    }
  }
  for (double& v : quad.component_posterior) {
    v *= step;
    quad.p_observed += v;
  }
  for (double& v : quad.component_posterior) v /= quad.p_observed;
  return quad;
}

std::string fit_json(const char* name, const HybridFitReport& fit) {
  std::string out;
  out += std::string("    \"") + name + "\": {\n";
  out += "        \"xi\": " + json_number_array(fit.posterior.xi) + ",\n";
  out += "        \"bound\": " + fmt_exact(fit.posterior.bound) + ",\n";
  out += "        \"weights\": " + json_number_array(fit.posterior.weights) + ",\n";
  out += "        \"means\": " + json_number_array(fit.posterior.means) + ",\n";
  out += "        \"variances\": " + json_number_array(fit.posterior.variances) + ",\n";
  out += "        \"iterations\": " + std::to_string(fit.iterations) + ",\n";
  out += std::string("        \"converged\": ") +
         (fit.converged ? "true" : "false") + "\n";
  out += "    }";
  return out;
}

void run_hybrid(const RunConfig& config, RunResult* result) {
  if (config.model_path.empty()) {
    throw ValidationError("this command needs --model");
  }
  HybridModel m = parse_hybrid_json(read_file(config.model_path));
  HybridFitReport shared = hybrid_fit(m, XiMode::kShared, config.tol,
                                      config.max_iters);
  HybridFitReport per = hybrid_fit(m, XiMode::kPerComponent, config.tol,
                                   config.max_iters);
  HybridQuadrature quad = integrate_observation(m);

  const int points = 2001;
  double step = (quad.hi - quad.lo) / (points - 1);
  std::vector<double> xs(points), exact(points), single_xi(points),
      conditional_xi(points);
  for (int i = 0; i < points; ++i) {
    double x = quad.lo + step * static_cast<double>(i);
    xs[static_cast<std::size_t>(i)] = x;
    exact[static_cast<std::size_t>(i)] =
        exact_joint_density(m, x) / quad.p_observed;
    single_xi[static_cast<std::size_t>(i)] =
        mixture_density(shared.posterior, x);
    conditional_xi[static_cast<std::size_t>(i)] =
        mixture_density(per.posterior, x);
  }

  std::string out;
  if (config.format == "structured") {
    out += "{\n";
    out += "    \"command\": \"hybrid\",\n";
    out += "    \"p_observation\": " + fmt_exact(quad.p_observed) + ",\n";
    out += "    \"component_posterior\": " +
           json_number_array(quad.component_posterior) + ",\n";
    out += fit_json("single", shared) + ",\n";
    out += fit_json("conditional", per) + ",\n";
    out += "    \"series\": {\n";
    out += "        \"x\": " + json_number_array(xs) + ",\n";
    out += "        \"exact\": " + json_number_array(exact) + ",\n";
    out += "        \"single_xi\": " + json_number_array(single_xi) + ",\n";
    out += "        \"conditional_xi\": " + json_number_array(conditional_xi) + "\n";
    out += "    }\n";
    out += "}\n";
  } else {
    put_comment(out, "command", std::string("hybrid"));
    put_comment(out, "converged", (shared.converged && per.converged) ? 1 : 0);
    put_comment(out, "p_observation", quad.p_observed);
    {
      std::string s;
      for (std::size_t t = 0; t < quad.component_posterior.size(); ++t) {
        if (t) s += ' ';
        s += fmt_table(quad.component_posterior[t]);
      }
      put_comment(out, "component_posterior", s);
    }
    put_comment(out, "bound_single", shared.posterior.bound);
    put_comment(out, "bound_conditional", per.posterior.bound);
    put_comment(out, "xi_single", shared.posterior.xi[0]);
    {
      std::string s;
      for (std::size_t t = 0; t < per.posterior.xi.size(); ++t) {
        if (t) s += ' ';
        s += fmt_table(per.posterior.xi[t]);
      }
      put_comment(out, "xi_conditional", s);
    }
    out += "x exact single_xi conditional_xi\n";
    for (int i = 0; i < points; ++i) {
      out += fmt_table(xs[static_cast<std::size_t>(i)]);
      out += ' ';
      out += fmt_table(exact[static_cast<std::size_t>(i)]);
      out += ' ';
      out += fmt_table(single_xi[static_cast<std::size_t>(i)]);
      out += ' ';
      out += fmt_table(conditional_xi[static_cast<std::size_t>(i)]);
      out += '\n';
    }
  }
  result->artifact = std::move(out);
  if (!(shared.converged && per.converged)) {
    result->exit_code = 4;
    result->message = "hybrid fit did not converge within " +
                      std::to_string(config.max_iters) + " iterations";
  }
}

// ---------------------------------------------------------------------------
// bench

struct BenchRow {
  int model = 0;
  std::string method;
  double kl = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};

std::string run_bench(const RunConfig& config) {
  const int n_models = 8;
  const int n_vars = 6;
  std::vector<BenchRow> rows;
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < n_models; ++i) {
    Rng rng(config.seed + static_cast<std::uint64_t>(i));
    TargetModel p = random_pairwise_model(rng, n_vars, 0.5, 1.0, 0.5);
    std::vector<Cluster> singles = singleton_clusters(n_vars);

    // All three methods fit the same fully factorized family, so the KL
    // column compares optimizers rather than families.
    {
      UndirectedApprox q = make_undirected_approx(p, singles);
      auto t0 = clock::now();
      DescentReport rep = optimize(q, p, fit_options(config, 0));
      auto t1 = clock::now();
      rows.push_back({i, "mf",
                      std::max(kl_divergence(q.q_tree, p), 0.0), rep.sweeps,
                      std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }
    {
      DirectedApprox q = make_directed_approx(p, singles);
      auto t0 = clock::now();
      DescentReport rep = directed_optimize(q, p, fit_options(config, 0));
      auto t1 = clock::now();
      rows.push_back({i, "dmf",
                      std::max(kl_divergence(q.q_tree, p), 0.0), rep.sweeps,
                      std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }
    {
      JunctionTreeApprox q = make_jt_approx(p, singles);
      auto t0 = clock::now();
      DescentReport rep = jt_optimize(q, p, fit_options(config, 0));
      auto t1 = clock::now();
      rows.push_back({i, "jtmf",
                      std::max(kl_divergence(to_compiled_tree(q), p), 0.0),
                      rep.sweeps,
                      std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }
  }

  std::string out;
  if (config.format == "structured") {
    out += "{\n";
    out += "    \"command\": \"bench\",\n";
    out += "    \"rows\": [\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const BenchRow& r = rows[i];
      out += "        {\"model\": " + std::to_string(r.model) +
             ", \"method\": \"" + r.method + "\", \"kl\": " + fmt_exact(r.kl) +
             ", \"iterations\": " + std::to_string(r.iterations) +
             ", \"wall_ms\": " + fmt_exact(r.wall_ms) + "}";
      out += (i + 1 < rows.size()) ? ",\n" : "\n";
    }
    out += "    ]\n";
    out += "}\n";
  } else {
    put_comment(out, "command", std::string("bench"));
    out += "model method kl iterations wall_ms\n";
    for (const BenchRow& r : rows) {
      out += std::to_string(r.model);
      out += ' ';
      out += r.method;
      out += ' ';
      out += fmt_table(r.kl);
      out += ' ';
      out += std::to_string(r.iterations);
      out += ' ';
      out += fmt_table(r.wall_ms);
      out += '\n';
    }
  }
  return out;
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult result;
  try {
    validate_config(config);
    if (config.command == "exact") {
      result.artifact = run_exact(config);
    } else if (config.command == "mf" || config.command == "dmf" ||
               config.command == "jtmf") {
      run_fit_command(config, &result);
    } else if (config.command == "hybrid") {
      run_hybrid(config, &result);
    } else if (config.command == "bench") {
      result.artifact = run_bench(config);
    } else {
      throw ValidationError("unknown command '" + config.command + "'");
    }
  } catch (const TractabilityError& e) {
    return RunResult{3, "", e.what()};
  } catch (const StateCapError& e) {
    return RunResult{3, "", e.what()};
  } catch (const Error& e) {
    return RunResult{2, "", e.what()};
  }
  return result;
}

}  // namespace structmf::tools
