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

#ifndef STRUCTMF_TOOLS_RUNNER_HPP_
#define STRUCTMF_TOOLS_RUNNER_HPP_

#include <cstdint>
#include <string>

namespace structmf::tools {

/// One CLI invocation. `command` is one of exact, mf, dmf, jtmf, hybrid,
/// bench. Paths are read eagerly by run(); empty structure_path selects the
/// fully factorized default for the approximation commands.
struct RunConfig {
  std::string command;
  std::string model_path;
  std::string structure_path;
  double tol = 1e-9;
  int max_iters = 1000;
  std::string schedule = "sequential";
  std::uint64_t seed = 0;
  int restarts = 0;
  std::string format = "tabular";  // or "structured"
};

/// exit_code: 0 success, 2 parse/validation failure, 3 width or state-cap
/// budget exceeded, 4 fit did not converge. `artifact` is the output
/// document; it is non-empty on exit 4 (results are still useful) and empty
/// on 2 and 3. `message` is a human diagnostic for stderr.
struct RunResult {
  int exit_code = 0;
  std::string artifact;
  std::string message;
};

/// Executes the configured command. Never throws; failures are encoded in
/// the result. Identical configs produce byte-identical artifacts, except
/// for the wall-time column of `bench`.
RunResult run(const RunConfig& config);

}  // namespace structmf::tools

#endif  // STRUCTMF_TOOLS_RUNNER_HPP_
