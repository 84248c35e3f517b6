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
//
// End-to-end release gate. Each numbered check prints one PASS/FAIL line;
// the exit status is the number of failures. Every quantitative claim is
// verified against an oracle that does not share code with the machinery
// under test (full enumeration, dense minimization, or quadrature).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "io.hpp"
#include "runner.hpp"
#include "structmf/brute_force.hpp"
#include "structmf/directed_mf.hpp"
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
#include "support/dense_minimizer.hpp"
#include "support/generators.hpp"

using namespace structmf;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Cluster> factor_scopes(const TargetModel& m) {
  std::vector<Cluster> out;
  for (const Table& f : m.factors) out.push_back(f.scope());
  return out;
}

std::vector<Cluster> exact_clusters(const TargetModel& m) {
  return tree_structure_from_clusters(factor_scopes(m),
                                      static_cast<int>(m.variables.size()))
      .nodes;
}

// Breadth-first node order of a cluster tree. Guarantees every cluster after
// the first contributes a fresh variable, which the conditional family needs.
std::vector<Cluster> bfs_cluster_order(const TreeStructure& t) {
  std::size_t n = t.nodes.size();
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : t.edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<bool> seen(n, false);
  std::vector<Cluster> out;
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::queue<int> frontier;
    frontier.push(static_cast<int>(root));
    seen[root] = true;
    while (!frontier.empty()) {
      int v = frontier.front();
      frontier.pop();
      out.push_back(t.nodes[static_cast<std::size_t>(v)]);
      for (int w : adj[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          frontier.push(w);
        }
    }
  }
  return out;
}

// Converged fits from the earlier checks, kept for the event-bound check.
std::vector<std::pair<TargetModel, CompiledTree>> g_runs;

// ---------------------------------------------------------------------------

bool one_sweep_exact(std::string& detail) {
  Rng rng(4101);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    int n = 3 + rep % 6;
    TargetModel p = random_pairwise_model(rng, n, 0.6, 1.1, 0.6);
    UndirectedApprox q = make_undirected_approx(p, exact_clusters(p));
    OptimizeOptions opts;
    opts.schedule.kind = Schedule::Kind::kReverse;
    opts.max_sweeps = 1;
    optimize(q, p, opts);
    worst = std::max(worst, enumeration_kl(q.q_tree, p));
    g_runs.emplace_back(p, q.q_tree);
  }
  detail = "50 models, max divergence " + num(worst);
  return worst <= 1e-9;
}

bool monotone_descent(std::string& detail) {
  Rng rng(4202);
  long updates = 0;
  double worst_rise = -1e300;
  int models = 0;
  while (updates < 10500 && models < 400) {
    int n = 4 + models % 5;
    TargetModel p = random_pairwise_model(rng, n, 0.6, 1.4, 0.7);
    OptimizeOptions opts;
    opts.tol = 1e-13;
    opts.max_sweeps = 120;
    std::vector<double> trace;
    bool converged = false;
    CompiledTree tree;
    switch (models % 3) {
      case 0: {
        UndirectedApprox q =
            make_undirected_approx(p, testing::singleton_clusters(n));
        DescentReport r = optimize(q, p, opts);
        trace = r.fe_trace;
        converged = r.converged;
        tree = q.q_tree;
        break;
      }
      case 1: {
        DirectedApprox q =
            make_directed_approx(p, testing::singleton_clusters(n));
        DescentReport r = directed_optimize(q, p, opts);
        trace = r.fe_trace;
        converged = r.converged;
        tree = q.q_tree;
        break;
      }
      default: {
        JunctionTreeApprox q = make_jt_approx(p, testing::singleton_clusters(n));
        DescentReport r = jt_optimize(q, p, opts);
        trace = r.fe_trace;
        converged = r.converged;
        tree = to_compiled_tree(q);
        break;
      }
    }
    for (std::size_t i = 1; i < trace.size(); ++i)
      worst_rise = std::max(worst_rise, trace[i] - trace[i - 1]);
    updates += static_cast<long>(trace.size()) - 1;
    if (converged) g_runs.emplace_back(p, tree);
    ++models;
  }
  detail = std::to_string(updates) + " updates, worst rise " + num(worst_rise);
  return updates >= 10000 && worst_rise <= 1e-12;
}

bool oracle_equivalence(std::string& detail) {
  double worst_m = 0.0;
  double worst_z = 0.0;
  auto check = [&](const TargetModel& p) {
    int n = static_cast<int>(p.variables.size());
    CompiledTree tree = compile_model_tree(p);
    MarginalsResult oracle =
        brute_force_marginals(p, testing::singleton_clusters(n));
    worst_z = std::max(worst_z, std::abs(tree.log_z() - oracle.log_z));
    for (int v = 0; v < n; ++v) {
      Table m = tree.marginal(Cluster{v});
      const Table& o = oracle.marginals[static_cast<std::size_t>(v)];
      for (std::size_t s = 0; s < m.size(); ++s)
        worst_m = std::max(worst_m, std::abs(m[s] - o[s]));
    }
  };
  check(testing::asia_model());
  Rng rng(4303);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + rep % 9;
    if (rep % 2 == 0) {
      check(random_pairwise_model(rng, n, 0.5, 1.2, 0.6));
    } else {
      check(random_tree_model(rng, n, 3, 1.1));
    }
  }
  detail = "marginal gap " + num(worst_m) + ", log-normalizer gap " + num(worst_z);
  return worst_m <= 1e-10 && worst_z <= 1e-10;
}

bool structured_beats_factorized(std::string& detail) {
  TargetModel p = testing::asia_model();
  OptimizeOptions opts;
  opts.max_sweeps = 300;
  UndirectedApprox fact =
      make_undirected_approx(p, testing::singleton_clusters(8));
  DescentReport rf = optimize(fact, p, opts);
  double kl_fact = enumeration_kl(fact.q_tree, p);

  UndirectedApprox tree = make_undirected_approx(p, exact_clusters(p));
  init_from_distribution(tree, fact.q_tree);
  DescentReport rt = optimize(tree, p, opts);
  double kl_tree = enumeration_kl(tree.q_tree, p);

  if (rf.converged) g_runs.emplace_back(p, fact.q_tree);
  if (rt.converged) g_runs.emplace_back(p, tree.q_tree);
  detail = "factorized " + num(kl_fact) + ", tree-structured " + num(kl_tree);
  return kl_tree <= kl_fact + 1e-9;
}

bool hard_coupling_limit(std::string& detail) {
  double target = 0.5 + (-0.3);  // the two couplings a locked pair combines
  std::vector<double> gaps;
  double worst_fe_gap = 0.0;
  for (double w : {4.0, 6.0, 10.0}) {
    TargetModel p = testing::triangle_model(w);
    UndirectedApprox q =
        make_undirected_approx(p, {Cluster{0, 1}, Cluster{1, 2}});
    OptimizeOptions opts;
    opts.tol = 1e-13;
    opts.max_sweeps = 3000;
    DescentReport r = optimize(q, p, opts);
    double fe_mf = free_energy(q.q_tree, p);

    auto objective = [&](const std::vector<double>& x) {
      Table t01(Cluster{0, 1}, {2, 2}, {x[0], x[1], x[2], x[3]});
      Table t12(Cluster{1, 2}, {2, 2}, {x[4], x[5], x[6], x[7]});
      return testing::free_energy_by_enumeration({t01, t12}, p);
    };
    std::vector<double> from_mf;
    for (double v : q.variational[0].values()) from_mf.push_back(v);
    for (double v : q.variational[1].values()) from_mf.push_back(v);
    testing::MinimizeResult direct =
        testing::minimize(objective, std::vector<double>(8, 0.0));
    testing::MinimizeResult polished = testing::minimize(objective, from_mf);
    worst_fe_gap = std::max(
        worst_fe_gap,
        std::abs(fe_mf - std::min(direct.value, polished.value)));

    gaps.push_back(std::abs(testing::pair_coupling(q.variational[1]) - target));
    if (r.converged) g_runs.emplace_back(p, q.q_tree);
  }
  bool monotone = gaps[1] <= gaps[0] + 1e-9 && gaps[2] <= gaps[1] + 1e-9 &&
                  gaps[2] < gaps[0];
  detail = "free-energy gap " + num(worst_fe_gap) + ", coupling distance " +
           num(gaps[0]) + " > " + num(gaps[1]) + " > " + num(gaps[2]);
  return worst_fe_gap <= 1e-6 && monotone;
}

bool redundant_block_factorizes(std::string& detail) {
  Rng rng(4404);
  double worst = 0.0;
  bool all_converged = true;
  for (int rep = 0; rep < 20; ++rep) {
    TargetModel p = testing::fork_model_random(rng);
    UndirectedApprox q =
        make_undirected_approx(p, {Cluster{0}, Cluster{1, 2}});
    OptimizeOptions opts;
    opts.tol = 1e-12;
    opts.max_sweeps = 400;
    DescentReport r = optimize(q, p, opts);
    all_converged = all_converged && r.converged;
    worst = std::max(worst, factorization_gap(q.q_tree, Cluster{1, 2},
                                              {Cluster{1}, Cluster{2}}));
    if (r.converged) g_runs.emplace_back(p, q.q_tree);
  }
  detail = "20 draws, max within-block dependence " + num(worst);
  return all_converged && worst <= 1e-9;
}

bool event_bound_holds(std::string& detail) {
  double worst_violation = -1e300;
  for (const auto& [p, tree] : g_runs) {
    double kl = enumeration_kl(tree, p);
    EventBound b = whittaker_event_bound(tree, p, kl);
    worst_violation = std::max(worst_violation, b.max_discrepancy - b.bound);
  }
  detail = std::to_string(g_runs.size()) + " fits, worst margin breach " +
           num(worst_violation);
  return !g_runs.empty() && worst_violation <= 1e-9;
}

bool distribute_preserves_joint(std::string& detail) {
  Rng rng(4505);
  double worst_joint = 0.0;
  double worst_defect = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    int n = 3 + rep % 6;
    TargetModel p = random_tree_model(rng, n, 2, 1.0);
    JunctionTreeApprox q = jt_from_calibrated(compile_model_tree(p));

    auto quotient = [&]() {
      std::vector<double> out;
      std::vector<int> st(static_cast<std::size_t>(n), 0);
      std::uint64_t states = 1;
      for (int v = 0; v < n; ++v)
        states *= static_cast<std::uint64_t>(q.card.at(static_cast<std::size_t>(v)));
      for (std::uint64_t flat = 0; flat < states; ++flat) {
        std::uint64_t rem = flat;
        for (int v = 0; v < n; ++v) {
          int c = q.card.at(static_cast<std::size_t>(v));
          st[static_cast<std::size_t>(v)] =
              static_cast<int>(rem % static_cast<std::uint64_t>(c));
          rem /= static_cast<std::uint64_t>(c);
        }
        double p_num = 1.0, p_den = 1.0;
        for (const Table& t : q.node_potentials) {
          std::vector<int> sub;
          for (int v : t.scope().ids())
            sub.push_back(st[static_cast<std::size_t>(v)]);
          p_num *= t[t.flat_index(sub)];
        }
        for (const Table& t : q.separator_potentials) {
          std::vector<int> sub;
          for (int v : t.scope().ids())
            sub.push_back(st[static_cast<std::size_t>(v)]);
          p_den *= t[t.flat_index(sub)];
        }
        out.push_back(p_den == 0.0 ? 0.0 : p_num / p_den);
      }
      double total = 0.0;
      for (double v : out) total += v;
      for (double& v : out) v /= total;
      return out;
    };

    int gamma = rng.uniform_int(static_cast<int>(q.structure.nodes.size()));
    Table& pot = q.node_potentials[static_cast<std::size_t>(gamma)];
    double total = 0.0;
    for (std::size_t i = 0; i < pot.size(); ++i) {
      pot.values()[i] *= std::exp(rng.uniform(-0.8, 0.8));
      total += pot[i];
    }
    for (std::size_t i = 0; i < pot.size(); ++i) pot.values()[i] /= total;

    std::vector<double> before = quotient();
    distribute_evidence(q, gamma);
    std::vector<double> after = quotient();
    for (std::size_t i = 0; i < before.size(); ++i)
      worst_joint = std::max(worst_joint, std::abs(before[i] - after[i]));
    worst_defect = std::max(worst_defect, consistency_defect(q));
  }
  detail = "joint drift " + num(worst_joint) + ", consistency defect " +
           num(worst_defect);
  return worst_joint <= 1e-12 && worst_defect <= 1e-10;
}

bool families_agree(std::string& detail) {
  Rng rng(4606);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    TargetModel p = random_tree_model(rng, 5, 2, 1.2);
    std::vector<Cluster> clusters = bfs_cluster_order(
        tree_structure_from_clusters(factor_scopes(p), 5));
    OptimizeOptions opts;
    opts.tol = 1e-11;
    opts.max_sweeps = 500;

    UndirectedApprox u = make_undirected_approx(p, clusters);
    optimize(u, p, opts);
    double fe_u = free_energy(u.q_tree, p);

    DirectedApprox d = make_directed_approx(p, clusters);
    directed_optimize(d, p, opts);
    double fe_d = free_energy(d.q_tree, p);

    // Each family restarted from the other's optimum must stay put.
    DirectedApprox d2 = make_directed_approx(p, clusters);
    init_from_distribution(d2, u.q_tree);
    directed_optimize(d2, p, opts);
    UndirectedApprox u2 = make_undirected_approx(p, clusters);
    init_from_distribution(u2, d.q_tree);
    optimize(u2, p, opts);

    worst = std::max(worst, std::abs(fe_u - fe_d));
    worst = std::max(worst, std::abs(free_energy(d2.q_tree, p) - fe_u));
    worst = std::max(worst, std::abs(free_energy(u2.q_tree, p) - fe_d));
  }
  detail = "50 cases, worst free-energy spread " + num(worst);
  return worst <= 1e-6;
}

double evidence_by_enumeration(const CompiledTree& q, const LogisticUnit& u,
                               int n_vars) {
  std::vector<int> all;
  for (int v = 0; v < n_vars; ++v) all.push_back(v);
  Table joint = q.marginal(Cluster(all));
  double p_obs = 0.0;
  std::vector<int> st(static_cast<std::size_t>(n_vars), 0);
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    joint.decode(flat, st);
    double z = u.bias;
    for (std::size_t k = 0; k < u.vars.size(); ++k) {
      int pos = joint.scope().index_of(u.vars[k]);
      z += u.weights[k] * static_cast<double>(st[static_cast<std::size_t>(pos)]);
    }
    double sign = u.observed == 1 ? 1.0 : -1.0;
    p_obs += joint[flat] * std::exp(log_sigmoid(sign * z));
  }
  return -std::log(p_obs);
}

bool observation_bound_valid(std::string& detail) {
  Rng rng(4707);
  double worst_slack = 1e300;
  int checked = 0;
  while (checked < 1000) {
    // Factorized distributions: unary factors only.
    TargetModel p = random_pairwise_model(rng, 4, 0.0, 1.0, 1.3);
    CompiledTree q = compile_model_tree(p);
    LogisticUnit u;
    int k = 1 + rng.uniform_int(3);
    std::vector<int> vars = {0, 1, 2, 3};
    rng.shuffle(vars);
    for (int i = 0; i < k; ++i) {
      u.vars.push_back(vars[static_cast<std::size_t>(i)]);
      u.weights.push_back(rng.uniform(-2.5, 2.5));
    }
    std::sort(u.vars.begin(), u.vars.end());
    u.bias = rng.uniform(-1.5, 1.5);
    u.observed = rng.uniform() < 0.5 ? 0 : 1;
    double exact = evidence_by_enumeration(q, u, 4);
    for (double xi : {rng.uniform(0.0, 1.0), rng.uniform(-2.0, 3.0)}) {
      worst_slack =
          std::min(worst_slack, sigmoid_evidence_bound(q, u, xi) - exact);
      ++checked;
    }
  }

  // A point mass meets the bound exactly at the optimal parameter.
  double worst_eq = 0.0;
  for (int observed : {0, 1}) {
    TargetModel p;
    p.variables = {{0, "x0", 2}};
    p.factors.push_back(Table(Cluster{0}, {2}, {-2000.0, 0.0}));
    CompiledTree q = compile_model_tree(p);
    LogisticUnit u;
    u.vars = {0};
    u.weights = {1.7};
    u.bias = -0.6;
    u.observed = observed;
    double exact = evidence_by_enumeration(q, u, 1);
    XiSearchResult r = optimize_xi(q, u);
    worst_eq = std::max(worst_eq, std::abs(r.value - exact));
  }
  detail = std::to_string(checked) + " triples, min slack " + num(worst_slack) +
           ", point-mass gap " + num(worst_eq);
  return worst_slack >= -1e-12 && worst_eq <= 1e-12;
}

bool quadratic_bound_valid(std::string& detail) {
  Rng rng(4808);
  double worst_over = -1e300;
  double worst_tight = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    double x = rng.uniform(-30.0, 30.0);
    double xi = rng.uniform(0.0, 25.0);
    worst_over = std::max(
        worst_over, quadratic_log_sigmoid_bound(x, xi) - log_sigmoid(x));
    worst_tight = std::max(
        worst_tight,
        std::abs(quadratic_log_sigmoid_bound(xi, xi) - log_sigmoid(xi)));
  }
  detail = "worst overshoot " + num(worst_over) + ", tangency gap " +
           num(worst_tight);
  return worst_over <= 1e-12 && worst_tight <= 1e-12;
}

bool mixture_curves_reproduce(std::string& detail) {
  HybridModel m;
  m.mixture = {0.7, 0.3};
  m.means = {10.0, 20.0};
  m.variances = {1.0, 1.0};
  m.w = -1.0;
  m.b = 5.0;
  m.observed = 0;

  HybridFitReport shared = hybrid_fit(m, XiMode::kShared);
  HybridFitReport per = hybrid_fit(m, XiMode::kPerComponent);

  // Quadrature oracle for the normalized conditional density.
  double lo = -2.0, hi = 32.0;
  double p_obs = 0.0;
  {
    const int n = 200000;
    double step = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
      double w = (i == 0 || i == n) ? 0.5 : 1.0;
      p_obs += w * exact_joint_density(m, lo + step * i);
    }
    p_obs *= step;
  }
  auto posterior_mixture = [](const HybridPosterior& q, double x) {
    double total = 0.0;
    for (std::size_t t = 0; t < q.weights.size(); ++t) {
      double d = x - q.means[t];
      total += q.weights[t] * std::exp(-0.5 * d * d / q.variances[t]) /
               std::sqrt(2.0 * M_PI * q.variances[t]);
    }
    return total;
  };
  double sup_shared = 0.0;
  double sup_per = 0.0;
  for (int i = 0; i <= 17000; ++i) {
    double x = lo + (hi - lo) * i / 17000.0;
    double exact = exact_joint_density(m, x) / p_obs;
    sup_shared =
        std::max(sup_shared, std::abs(posterior_mixture(shared.posterior, x) - exact));
    sup_per =
        std::max(sup_per, std::abs(posterior_mixture(per.posterior, x) - exact));
  }

  tools::RunConfig config;
  config.command = "hybrid";
  config.model_path = STRUCTMF_FIXTURE_DIR "/hybrid_two_peak.json";
  tools::RunResult a = tools::run(config);
  tools::RunResult b = tools::run(config);
  bool stable = a.exit_code == 0 && a.artifact == b.artifact &&
                a.artifact.find("x exact single_xi conditional_xi") !=
                    std::string::npos;

  detail = "sup errors " + num(sup_per) + " vs " + num(sup_shared) +
           (stable ? ", plot data byte-stable" : ", PLOT DATA UNSTABLE");
  return shared.converged && per.converged && sup_per <= 0.1 * sup_shared &&
         stable;
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Entry> entries = {
      {"one reverse sweep is exact when Q mirrors the target's tree",
       one_sweep_exact},
      {"free energy never rises across a coordinate update", monotone_descent},
      {"tree-calibrated marginals and log Z match enumeration",
       oracle_equivalence},
      {"tree-structured Q never loses to its factorized start",
       structured_beats_factorized},
      {"locked pairs fold their couplings into the remaining edge",
       hard_coupling_limit},
      {"a conditionally independent block factorizes at the optimum",
       redundant_block_factorizes},
      {"single-variable event error stays inside the divergence bound",
       event_bound_holds},
      {"distributing a potential edit preserves the joint",
       distribute_preserves_joint},
      {"conditional and potential families meet at the same free energy",
       families_agree},
      {"the observation bound dominates the true negative log evidence",
       observation_bound_valid},
      {"the quadratic bound stays under the log-logistic and touches it",
       quadratic_bound_valid},
      {"per-component curvature reproduces the two-peak posterior",
       mixture_curves_reproduce},
  };

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = entries[i].fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s %2zu  %s (%s)\n", ok ? "PASS" : "FAIL", i + 1,
                entries[i].label, detail.c_str());
  }
  return failures;
}
