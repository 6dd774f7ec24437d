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
#include "efsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "efsim/error.hpp"
#include "efsim/running_stats.hpp"

namespace efsim {

namespace {

MeanSe to_mean_se(const RunningStats& s) { return {s.mean(), s.std_error()}; }

template <class Map>
void check_comparable(const Map& ensembles) {
  if (ensembles.empty()) throw Error(ErrorCode::invalid_comparison, "no ensembles to compare");
  const EnsembleSummary& first = ensembles.begin()->second;
  for (const auto& [key, summary] : ensembles) {
    if (summary.comparison_key != first.comparison_key || summary.horizon != first.horizon ||
        summary.seeds != first.seeds) {
      throw Error(ErrorCode::invalid_comparison,
                  "ensembles differ in more than the swept parameter");
    }
  }
}

}  // namespace

EnsembleSummary summarize(std::span<const Trajectory> runs, std::string comparison_key) {
  if (runs.empty()) throw_invalid("cannot summarize an empty ensemble");
  std::vector<const Trajectory*> sorted;
  sorted.reserve(runs.size());
  for (const Trajectory& tr : runs) sorted.push_back(&tr);
  std::sort(sorted.begin(), sorted.end(),
            [](const Trajectory* a, const Trajectory* b) { return a->seed < b->seed; });

  const Trajectory& first = *sorted.front();
  const std::size_t rows = first.rows.size();
  for (const Trajectory* tr : sorted) {
    if (tr->horizon != first.horizon || tr->rows.size() != rows) {
      throw Error(ErrorCode::invalid_comparison, "trajectories differ in horizon or recording");
    }
  }

  EnsembleSummary out;
  out.comparison_key = std::move(comparison_key);
  out.seeds = sorted.size();
  out.horizon = first.horizon;
  out.t.resize(rows);
  out.subopt.resize(rows);
  out.grad_norm_sq.resize(rows);
  out.err_norm_sq.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    RunningStats sub;
    RunningStats grad;
    RunningStats err;
    for (const Trajectory* tr : sorted) {
      const MetricRow& row = tr->rows[r];
      if (row.t != first.rows[r].t) {
        throw Error(ErrorCode::invalid_comparison, "trajectories recorded different iterations");
      }
      sub.push(row.subopt);
      grad.push(row.grad_norm_sq);
      err.push(row.err_norm_sq);
    }
    out.t[r] = first.rows[r].t;
    out.subopt[r] = to_mean_se(sub);
    out.grad_norm_sq[r] = to_mean_se(grad);
    out.err_norm_sq[r] = to_mean_se(err);
  }

  RunningStats fin;
  RunningStats avg;
  RunningStats wavg;
  RunningStats gavg;
  for (const Trajectory* tr : sorted) {
    fin.push(tr->final_subopt);
    avg.push(tr->averaged_subopt);
    wavg.push(tr->weighted_subopt);
    gavg.push(tr->mean_grad_norm_sq);
  }
  out.final_subopt = to_mean_se(fin);
  out.averaged_subopt = to_mean_se(avg);
  out.weighted_subopt = to_mean_se(wavg);
  out.mean_grad_norm_sq = to_mean_se(gavg);
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::cannot_fit, "slope fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::cannot_fit, "log-log fit needs positive values");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error(ErrorCode::cannot_fit, "log-log fit needs distinct x values");
  return sxy / sxx;
}

double fit_rate_slope(const EnsembleSummary& summary, std::size_t t_begin, std::size_t t_end) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t r = 0; r < summary.t.size(); ++r) {
    const std::size_t t = summary.t[r];
    if (t < t_begin || t > t_end || t == 0) continue;
    xs.push_back(static_cast<double>(t));
    ys.push_back(summary.subopt[r].mean);
  }
  if (xs.size() < 10) throw Error(ErrorCode::cannot_fit, "fit window holds fewer than 10 points");
  return loglog_slope(xs, ys);
}

double fit_rate_slope(const EnsembleSummary& summary) {
  return fit_rate_slope(summary, std::max<std::size_t>(summary.horizon / 10, 1), summary.horizon);
}

std::optional<std::size_t> first_hit_time(const EnsembleSummary& summary, double eps) {
  for (std::size_t r = 0; r < summary.t.size(); ++r) {
    if (summary.subopt[r].mean <= eps) return summary.t[r];
  }
  return std::nullopt;
}

const MeanSe& final_metric(const EnsembleSummary& summary, FinalMetric metric) {
  switch (metric) {
    case FinalMetric::last_iterate:
      return summary.final_subopt;
    case FinalMetric::averaged:
      return summary.averaged_subopt;
    case FinalMetric::weighted:
      return summary.weighted_subopt;
  }
  return summary.averaged_subopt;
}

DelayRobustnessReport delay_robustness_report(const std::map<double, EnsembleSummary>& by_tau,
                                              double threshold, FinalMetric metric) {
  check_comparable(by_tau);
  DelayRobustnessReport report;
  report.threshold = threshold;
  for (const auto& [tau, summary] : by_tau) report.rows.push_back({tau, final_metric(summary, metric)});
  const std::size_t n = report.rows.size();
  report.ratios.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double denom = report.rows[j].final.mean;
      report.ratios[i][j] = denom > 0.0 ? report.rows[i].final.mean / denom
                                        : std::numeric_limits<double>::infinity();
      if (i == j) report.ratios[i][j] = 1.0;
      report.max_ratio = std::max(report.max_ratio, report.ratios[i][j]);
    }
  }
  report.flagged = report.max_ratio > threshold;
  return report;
}

VarianceReductionReport variance_reduction_report(
    const std::map<std::size_t, EnsembleSummary>& by_workers, double sigma2, FinalMetric metric) {
  check_comparable(by_workers);
  VarianceReductionReport report;
  for (const auto& [k, summary] : by_workers) report.rows.push_back({k, final_metric(summary, metric)});
  if (!(sigma2 > 0.0)) {
    report.applicable = false;
    report.note = "optimization-dominated; 1/K check not applicable";
    return report;
  }
  if (report.rows.size() < 2) {
    report.applicable = false;
    report.note = "single K; no exponent to fit";
    return report;
  }
  std::vector<double> ks;
  std::vector<double> finals;
  for (const auto& row : report.rows) {
    ks.push_back(static_cast<double>(row.workers));
    finals.push_back(row.final.mean);
  }
  report.exponent = loglog_slope(ks, finals);
  return report;
}

}  // namespace efsim
