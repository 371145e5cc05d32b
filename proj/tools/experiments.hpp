// Copyright 2026 The Funnel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUNNEL_TOOLS_EXPERIMENTS_HPP_
#define FUNNEL_TOOLS_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace funnel::tools {

// Desk-scale experiment sweeps. Every stochastic column derives from
// (seed, instance index), so re-running a config reproduces everything
// except wall-clock timings.
struct ExperimentConfig {
  std::string kind;  // ldp-vs-lip | lip-vs-srlip | protocols-on-dataset |
                     // grr-vs-cr-synthetic | alpha-vs-epsilon
  std::vector<double> eps_grid{0.5, 1.0, 1.5, 2.0};
  int instances = 10;
  std::uint64_t seed = 1;
  int c = 2;
  int a = 5;
  std::vector<int> shape;                       // lip-vs-srlip
  std::vector<std::pair<int, int>> ac_pairs;    // grr-vs-cr-synthetic
  std::string prior_path;                       // dataset-driven kinds
  std::string out_dir = ".";
  std::string format = "csv";                   // csv | json
};

// Runs the configured sweep, writes result files into out_dir, and returns
// the paths written. Per-row failures are recorded in a status column
// instead of aborting the sweep.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

std::uint64_t instance_seed(std::uint64_t master, std::uint64_t index);

}  // namespace funnel::tools

#endif  // FUNNEL_TOOLS_EXPERIMENTS_HPP_
