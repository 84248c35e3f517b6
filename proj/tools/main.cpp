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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  structmf::tools::RunConfig config;
  std::string out_path;

  CLI::App app{"structured variational fits for discrete models"};
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* blurb;
    bool wants_model;
    bool wants_structure;
  };
  const SubSpec specs[] = {
      {"exact", "exact marginals and log normalizer", true, false},
      {"mf", "undirected cluster mean-field fit", true, true},
      {"dmf", "directed (chain-rule) mean-field fit", true, true},
      {"jtmf", "junction-tree structured fit", true, true},
      {"hybrid", "mixture-of-Gaussians observation bound", true, false},
      {"bench", "method comparison on seeded random models", false, false},
  };
  for (const SubSpec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.blurb);
    if (s.wants_model) {
      sub->add_option("--model", config.model_path, "model document (JSON)")
          ->required();
    }
    if (s.wants_structure) {
      sub->add_option("--structure", config.structure_path,
                      "approximating structure document (JSON)");
    }
    sub->add_option("--tol", config.tol, "convergence threshold");
    sub->add_option("--max-iters", config.max_iters,
                    "sweep or iteration cap");
    sub->add_option("--schedule", config.schedule,
                    "cluster visit order within a sweep")
        ->check(CLI::IsMember({"sequential", "reverse", "random"}));
    sub->add_option("--seed", config.seed,
                    "seed for random schedules, restarts, and bench models");
    sub->add_option("--restarts", config.restarts,
                    "extra fits from perturbed starts; the best one is kept");
    sub->add_option("--out", out_path, "write the artifact here (default stdout)");
    sub->add_option("--format", config.format, "artifact format")
        ->check(CLI::IsMember({"tabular", "structured"}));
    std::string name = s.name;
    sub->callback([&config, name] { config.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  structmf::tools::RunResult result = structmf::tools::run(config);
  if (!result.message.empty()) std::cerr << result.message << "\n";
  if (!result.artifact.empty()) {
    if (out_path.empty()) {
      std::fwrite(result.artifact.data(), 1, result.artifact.size(), stdout);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 2;
      }
      out.write(result.artifact.data(),
                static_cast<std::streamsize>(result.artifact.size()));
    }
  }
  return result.exit_code;
}
