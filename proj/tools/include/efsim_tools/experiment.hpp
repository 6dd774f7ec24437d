// Copyright 2026 The efsim Authors. All Rights Reserved.
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
// =============================================================================
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efsim/analysis.hpp"
#include "efsim/engine.hpp"
#include "efsim/objective.hpp"
#include "efsim/oracle.hpp"
#include "efsim/schedule.hpp"
#include "efsim_tools/config.hpp"

namespace efsim::tools {

struct Problem {
  std::shared_ptr<const Objective> objective;
  GradientOracle oracle;
  Vec x0;
};

Problem build_problem(const ExperimentConfig& config);

// One combination of the algorithm grid.
struct ExperimentPoint {
  std::string id;                                // e.g. "tau-4" or "workers-16_tau-8"
  std::map<std::string, std::string> params;     // swept key -> value
  AlgorithmSpec spec;
  StepsizeSchedule stepsize = StepsizeSchedule::constant(1.0);
  WeightSchedule weights = WeightSchedule::uniform();
  double tau_eff = 1.0;
  double cap = 0.0;
  std::optional<double> kappa;
};

// Throws ConfigError when a point violates a theorem guard.
std::vector<ExperimentPoint> expand_points(const ExperimentConfig& config, const Problem& problem);

FinalMetric parse_metric(const std::string& name);

// Column order is fixed; numbers use the shortest round-trip form.
std::string trajectory_csv(const Trajectory& trajectory);

struct RunExperimentOptions {
  std::size_t jobs = 0;  // 0 = available parallelism
  std::optional<std::filesystem::path> output_root;
};

struct ExperimentOutcome {
  int exit_code = 0;  // 0 ok, 3 divergence
  std::filesystem::path output_dir;
  std::string message;
  std::size_t trajectory_files = 0;
  std::size_t summaries = 0;
};

// Runs every (point, seed) task and writes
//   <out>/<point>/seed-<s>.csv, <out>/<point>/summary.json, <out>/manifest.json,
//   <out>/robustness_report.json (tau grids), <out>/variance_report.json (K grids).
// Outputs are staged and renamed into place; nothing is left behind on failure.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const RunExperimentOptions& options = {});

std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const std::optional<std::filesystem::path>& root);

}  // namespace efsim::tools
