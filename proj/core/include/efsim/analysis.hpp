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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efsim/engine.hpp"

namespace efsim {

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n)
};

// Per-iteration mean and standard error across seeds, plus the final
// theorem metrics.
struct EnsembleSummary {
  std::string comparison_key;  // configuration minus the swept parameter
  std::size_t seeds = 0;
  std::size_t horizon = 0;
  std::vector<std::size_t> t;
  std::vector<MeanSe> subopt;
  std::vector<MeanSe> grad_norm_sq;
  std::vector<MeanSe> err_norm_sq;
  MeanSe final_subopt;
  MeanSe averaged_subopt;
  MeanSe weighted_subopt;
  MeanSe mean_grad_norm_sq;
};

// Trajectories must share horizon and recorded iterations. Seeds are
// aggregated in ascending order, so the result does not depend on the
// input order.
EnsembleSummary summarize(std::span<const Trajectory> runs, std::string comparison_key = {});

// Least-squares slope of log(y) against log(x). Throws cannot_fit for
// non-positive values or fewer than two points.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Slope of log(mean suboptimality) against log(t) over recorded iterations
// in [t_begin, t_end]. Needs at least 10 points, all positive.
double fit_rate_slope(const EnsembleSummary& summary, std::size_t t_begin, std::size_t t_end);
// Default window: the last decade [T/10, T].
double fit_rate_slope(const EnsembleSummary& summary);

// First recorded iteration with mean suboptimality <= eps.
std::optional<std::size_t> first_hit_time(const EnsembleSummary& summary, double eps);

enum class FinalMetric { last_iterate, averaged, weighted };

const MeanSe& final_metric(const EnsembleSummary& summary, FinalMetric metric);

struct RobustnessRow {
  double tau = 0.0;
  MeanSe final;
};

struct DelayRobustnessReport {
  std::vector<RobustnessRow> rows;
  std::vector<std::vector<double>> ratios;  // ratios[i][j] = final_i / final_j
  double max_ratio = 1.0;
  double threshold = 2.0;
  bool flagged = false;  // max_ratio > threshold
};

// Throws invalid_comparison unless all ensembles share comparison key,
// horizon and seed count.
DelayRobustnessReport delay_robustness_report(const std::map<double, EnsembleSummary>& by_tau,
                                              double threshold = 2.0,
                                              FinalMetric metric = FinalMetric::averaged);

struct VarianceRow {
  std::size_t workers = 0;
  MeanSe final;
};

struct VarianceReductionReport {
  std::vector<VarianceRow> rows;
  std::optional<double> exponent;  // fitted exponent of K; absent when not applicable
  bool applicable = true;
  std::string note;
};

// sigma2 = 0 yields a report flagged as optimization-dominated.
VarianceReductionReport variance_reduction_report(
    const std::map<std::size_t, EnsembleSummary>& by_workers, double sigma2,
    FinalMetric metric = FinalMetric::averaged);

}  // namespace efsim
