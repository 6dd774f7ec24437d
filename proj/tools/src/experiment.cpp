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
#include "efsim_tools/experiment.hpp"

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "efsim/error.hpp"
#include "efsim/format.hpp"
#include "efsim/least_squares.hpp"
#include "efsim/rng.hpp"
#include "efsim_tools/fingerprint.hpp"
#include "json.hpp"

#ifndef EFSIM_VERSION_STRING
#define EFSIM_VERSION_STRING "unknown"
#endif

namespace efsim::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const ExperimentConfig& config, const std::string& field,
                              const std::string& message) {
  throw ConfigError(field, config.line_of(field), message);
}

std::string format_number(double v) { return shortest(v); }

}  // namespace

Problem build_problem(const ExperimentConfig& config) {
  const auto& oc = config.objective;
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const FiniteSumObjective> finite_sum;
  try {
    if (oc.kind == "quadratic") {
      objective = make_quadratic(oc.dim, oc.mu, oc.smoothness);
    } else if (oc.kind == "star-convex-1d") {
      objective = make_star_convex_1d();
    } else if (oc.kind == "nonconvex-radial") {
      objective = make_nonconvex_radial(oc.dim, oc.mu);
    } else {
      RngStream data(oc.data_seed, 0, StreamPurpose::data);
      auto ls = make_least_squares(oc.samples, oc.dim, data, oc.noise_level);
      finite_sum = ls;
      objective = ls;
    }
  } catch (const Error& e) {
    config_fail(config, "objective.kind", e.what());
  }

  const auto& rc = config.oracle;
  std::optional<GradientOracle> oracle;
  if (rc.kind == "none") {
    oracle = GradientOracle::deterministic(objective);
  } else if (rc.kind == "additive") {
    oracle = GradientOracle::additive(objective, rc.sigma2);
  } else if (rc.kind == "strong-growth") {
    oracle = GradientOracle::strong_growth(objective, rc.m);
  } else {
    if (!finite_sum) {
      config_fail(config, "oracle.kind", "finite-sum sampling needs a least-squares objective");
    }
    oracle = GradientOracle::finite_sum(finite_sum);
  }

  const std::size_t d = objective->dim();
  Vec direction = Vec::ones(d);
  if (config.x0 == "basis") {
    direction = Vec::basis(d, 0);
  } else if (config.x0 == "gaussian") {
    RngStream data(oc.data_seed, 1, StreamPurpose::data);
    direction = gaussian_vector(data, d, std::sqrt(static_cast<double>(d)));
  }
  Vec x0 = objective->reference_point();
  x0.axpy(config.x0_scale, direction);
  return Problem{objective, std::move(*oracle), std::move(x0)};
}

FinalMetric parse_metric(const std::string& name) {
  if (name == "last") return FinalMetric::last_iterate;
  if (name == "weighted") return FinalMetric::weighted;
  return FinalMetric::averaged;
}

namespace {

struct GridEntry {
  std::map<std::string, std::string> params;
  AlgorithmSpec spec;
};

std::vector<GridEntry> algorithm_grid(const AlgorithmConfig& a, std::size_t dim) {
  std::vector<GridEntry> grid;
  const auto tau_name = [](std::size_t t) { return std::to_string(t); };
  if (a.kind == "sgd") {
    grid.push_back({{}, PlainSgd{}});
  } else if (a.kind == "dsgd") {
    const DelayModel model = a.delay == "fixed" ? DelayModel::fixed : DelayModel::iid_bounded;
    for (auto t : a.tau) grid.push_back({{{"tau", tau_name(t)}}, DelayedSgd{t, model}});
  } else if (a.kind == "minibatch") {
    for (auto t : a.tau) grid.push_back({{{"tau", tau_name(t)}}, MiniBatchSgd{t}});
  } else if (a.kind == "local") {
    for (auto k : a.workers) {
      for (auto t : a.tau) {
        grid.push_back({{{"workers", std::to_string(k)}, {"tau", tau_name(t)}}, LocalSgd{k, t}});
      }
    }
  } else {
    if (a.compressor == "identity") {
      grid.push_back({{}, CompressedSgd{Compressor::identity()}});
    } else if (a.compressor == "rand-drop") {
      for (auto t : a.tau) {
        grid.push_back({{{"tau", tau_name(t)}},
                        CompressedSgd{Compressor::rand_drop(static_cast<double>(t))}});
      }
    } else if (a.compressor == "rand-coordinate") {
      for (auto d : a.delta) {
        grid.push_back({{{"delta", format_number(d)}}, CompressedSgd{Compressor::rand_coordinate(d)}});
      }
    } else {
      for (auto k : a.k) {
        grid.push_back({{{"k", std::to_string(k)}}, CompressedSgd{Compressor::top_k(k, dim)}});
      }
    }
  }
  return grid;
}

std::string point_id(const std::string& kind, const std::map<std::string, std::string>& params) {
  if (params.empty()) return kind;
  std::string id;
  for (const auto& [key, value] : params) {
    if (!id.empty()) id += "_";
    id += key + "-" + value;
  }
  return id;
}

}  // namespace

std::vector<ExperimentPoint> expand_points(const ExperimentConfig& config, const Problem& problem) {
  const Objective& f = *problem.objective;
  const double l = f.smoothness();
  const double mu = f.mu();
  const double m = problem.oracle.declared_m();
  const double sigma2 = problem.oracle.declared_sigma2();
  const auto& sc = config.schedule;

  std::vector<ExperimentPoint> points;
  for (auto& entry : algorithm_grid(config.algorithm, f.dim())) {
    ExperimentPoint p;
    p.params = entry.params;
    p.id = point_id(config.algorithm.kind, entry.params);
    p.spec = entry.spec;
    p.tau_eff = effective_tau(p.spec);
    try {
      p.cap = theorem_stepsize_cap(l, p.tau_eff, m);
      if (!sc.regime.empty()) {
        PresetInputs in;
        in.smoothness = l;
        in.mu = mu;
        in.m = m;
        in.sigma2 = sigma2;
        in.tau_eff = p.tau_eff;
        in.workers = static_cast<double>(worker_count(p.spec));
        in.dist0_sq = distance_sq(problem.x0, f.reference_point());
        in.subopt0 = f.suboptimality(problem.x0);
        in.horizon = config.horizon;
        const SchedulePreset preset = make_schedule_preset(parse_regime(sc.regime), in);
        p.stepsize = preset.stepsize;
        p.weights = preset.weights;
        if (preset.kappa > 0.0) p.kappa = preset.kappa;
      } else if (sc.kind == "constant") {
        p.stepsize = StepsizeSchedule::constant(sc.gamma.value_or(p.cap), p.cap);
      } else {
        const double kappa = sc.kappa ? *sc.kappa : theorem_kappa(l, mu, p.tau_eff, m);
        p.kappa = kappa;
        p.stepsize = StepsizeSchedule::inverse_time(mu, kappa, p.cap);
      }
      if (sc.regime.empty()) {
        if (sc.weights == "linear") {
          p.weights = WeightSchedule::linear(p.kappa ? *p.kappa : theorem_kappa(l, mu, p.tau_eff, m));
        } else if (sc.weights == "exponential") {
          if (p.stepsize.kind() != StepsizeKind::constant) {
            config_fail(config, "schedule.weights", "exponential weights need a constant stepsize");
          }
          p.weights = WeightSchedule::exponential(1.0 - mu * p.stepsize.gamma() / 2.0);
        }
      }
      if (sc.enforce_caps && !p.stepsize.within_cap()) {
        std::ostringstream os;
        os.precision(6);
        os << "point " << p.id << ": stepsize " << p.stepsize.at(0) << " exceeds the theorem cap "
           << p.cap << " (set enforce_caps = false to override)";
        config_fail(config, sc.regime.empty() ? "schedule.gamma" : "schedule.preset", os.str());
      }
    } catch (const Error& e) {
      const std::string field = e.code() == ErrorCode::requires_strong_convexity
                                    ? (sc.regime.empty() ? "schedule.kind" : "schedule.preset")
                                    : "schedule";
      config_fail(config, field, "point " + p.id + ": " + e.what());
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,seed,subopt,grad_norm_sq,err_norm_sq,consistency_residual,worker_dispersion\n";
  const std::string seed = std::to_string(trajectory.seed);
  for (const MetricRow& row : trajectory.rows) {
    out += std::to_string(row.t);
    out += ',';
    out += seed;
    for (double v : {row.subopt, row.grad_norm_sq, row.err_norm_sq, row.consistency_residual,
                     row.worker_dispersion}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

fs::path resolve_output_dir(const ExperimentConfig& config, const std::optional<fs::path>& root) {
  fs::path out(config.output);
  if (out.is_relative() && root) out = *root / out;
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

json mean_se_json(const MeanSe& v) { return json{{"mean", v.mean}, {"std_error", v.std_error}}; }

json summary_json(const ExperimentPoint& p, const EnsembleSummary& s, const ExperimentConfig& config) {
  json j;
  j["point"] = p.id;
  j["algorithm"] = describe(p.spec);
  j["params"] = p.params;
  j["stepsize"] = p.stepsize.describe();
  j["weights"] = p.weights.describe();
  j["tau_eff"] = p.tau_eff;
  j["stepsize_cap"] = p.cap;
  j["kappa"] = p.kappa ? json(*p.kappa) : json(nullptr);
  j["seeds"] = s.seeds;
  j["horizon"] = s.horizon;
  j["final"] = {
      {"last_iterate_subopt", mean_se_json(s.final_subopt)},
      {"averaged_subopt", mean_se_json(s.averaged_subopt)},
      {"weighted_subopt", mean_se_json(s.weighted_subopt)},
      {"mean_grad_norm_sq", mean_se_json(s.mean_grad_norm_sq)},
      {"metric", config.report.metric},
  };
  try {
    j["slope_last_decade"] = fit_rate_slope(s);
  } catch (const Error& e) {
    j["slope_last_decade"] = nullptr;
    j["slope_note"] = e.what();
  }
  json series;
  series["t"] = s.t;
  std::vector<double> sm, sse, gm, gse, em, ese;
  for (std::size_t r = 0; r < s.t.size(); ++r) {
    sm.push_back(s.subopt[r].mean);
    sse.push_back(s.subopt[r].std_error);
    gm.push_back(s.grad_norm_sq[r].mean);
    gse.push_back(s.grad_norm_sq[r].std_error);
    em.push_back(s.err_norm_sq[r].mean);
    ese.push_back(s.err_norm_sq[r].std_error);
  }
  series["subopt_mean"] = sm;
  series["subopt_std_error"] = sse;
  series["grad_norm_sq_mean"] = gm;
  series["grad_norm_sq_std_error"] = gse;
  series["err_norm_sq_mean"] = em;
  series["err_norm_sq_std_error"] = ese;
  j["series"] = std::move(series);
  return j;
}

// Key of all swept parameters except `excluded`.
std::string group_key(const ExperimentPoint& p, const std::string& excluded) {
  std::string key;
  for (const auto& [k, v] : p.params) {
    if (k == excluded) continue;
    key += k + "=" + v + ";";
  }
  return key;
}

struct TaskFailure {
  std::size_t task = 0;
  std::size_t iteration = 0;
  double subopt = 0.0;
};

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunExperimentOptions& options) {
  const Problem problem = build_problem(config);
  const std::vector<ExperimentPoint> points = expand_points(config, problem);
  const std::string fingerprint = sha256_hex(config.canonical());

  ExperimentOutcome outcome;
  outcome.output_dir = resolve_output_dir(config, options.output_root);
  const fs::path final_dir = outcome.output_dir;
  if (fs::exists(final_dir) && !fs::is_empty(final_dir) && !fs::exists(final_dir / "manifest.json")) {
    throw ConfigError("experiment.output", 0,
                      "refusing to overwrite non-empty directory without manifest.json: " +
                          final_dir.string());
  }
  const fs::path parent = final_dir.has_parent_path() ? final_dir.parent_path() : fs::path(".");
  fs::create_directories(parent);
  const fs::path staging =
      parent / ("." + final_dir.filename().string() + ".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging);
  fs::create_directories(staging);

  struct Task {
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < points.size(); ++p) {
    fs::create_directories(staging / points[p].id);
    for (auto seed : config.seeds) tasks.push_back({p, seed});
  }

  std::vector<Engine> engines;
  for (const auto& p : points) {
    engines.emplace_back(problem.oracle, p.spec, p.stepsize, config.schedule.enforce_caps);
  }

  std::vector<std::optional<Trajectory>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex failure_mutex;
  std::optional<TaskFailure> failure;
  std::exception_ptr other_error;

  const auto worker = [&]() {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const ExperimentPoint& point = points[task.point];
      try {
        RunOptions ro;
        ro.horizon = config.horizon;
        ro.seed = task.seed;
        ro.record_every = config.record_every;
        ro.weights = point.weights;
        Trajectory tr = run(engines[task.point], problem.x0, ro);
        write_file(staging / point.id / ("seed-" + std::to_string(task.seed) + ".csv"),
                   trajectory_csv(tr));
        results[i] = std::move(tr);
      } catch (const DivergenceError& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure || i < failure->task) failure = TaskFailure{i, e.iteration(), e.suboptimality()};
        stop = true;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!other_error) other_error = std::current_exception();
        stop = true;
      }
    }
  };

  std::size_t jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, tasks.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  if (failure || other_error) {
    fs::remove_all(staging);
    if (other_error) std::rethrow_exception(other_error);
    const Task& task = tasks[failure->task];
    std::ostringstream os;
    os << "divergence in run " << points[task.point].id << "/seed-" << task.seed
       << " at iteration " << failure->iteration << " (suboptimality " << failure->subopt << ")";
    outcome.exit_code = 3;
    outcome.message = os.str();
    return outcome;
  }

  const FinalMetric metric = parse_metric(config.report.metric);
  std::vector<EnsembleSummary> summaries;
  json manifest_points = json::array();
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<Trajectory> runs;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].point == p) runs.push_back(std::move(*results[i]));
    }
    summaries.push_back(summarize(runs));
    write_file(staging / points[p].id / "summary.json",
               summary_json(points[p], summaries.back(), config).dump(2) + "\n");
    ++outcome.summaries;
    outcome.trajectory_files += runs.size();
    manifest_points.push_back({{"id", points[p].id},
                               {"algorithm", describe(points[p].spec)},
                               {"stepsize", points[p].stepsize.describe()},
                               {"weights", points[p].weights.describe()},
                               {"tau_eff", points[p].tau_eff},
                               {"kappa", points[p].kappa ? json(*points[p].kappa) : json(nullptr)},
                               {"stepsize_cap", points[p].cap}});
  }

  // Delay robustness across tau, and variance reduction across K, for every
  // group of points that differ only in that parameter.
  const auto grouped = [&](const std::string& swept) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t p = 0; p < points.size(); ++p) {
      if (points[p].params.count(swept)) groups[group_key(points[p], swept)].push_back(p);
    }
    return groups;
  };
  json robustness = json::array();
  for (const auto& [key, members] : grouped("tau")) {
    if (members.size() < 2) continue;
    std::map<double, EnsembleSummary> by_tau;
    for (auto p : members) {
      EnsembleSummary s = summaries[p];
      s.comparison_key = key;
      by_tau.emplace(std::stod(points[p].params.at("tau")), std::move(s));
    }
    const auto rep = delay_robustness_report(by_tau, config.report.robustness_threshold, metric);
    json rows = json::array();
    for (const auto& row : rep.rows) rows.push_back({{"tau", row.tau}, {"final", mean_se_json(row.final)}});
    robustness.push_back({{"group", key},
                          {"metric", config.report.metric},
                          {"rows", rows},
                          {"ratios", rep.ratios},
                          {"max_ratio", rep.max_ratio},
                          {"threshold", rep.threshold},
                          {"flagged", rep.flagged}});
  }
  if (!robustness.empty()) {
    write_file(staging / "robustness_report.json", json{{"reports", robustness}}.dump(2) + "\n");
  }
  json variance = json::array();
  for (const auto& [key, members] : grouped("workers")) {
    if (members.size() < 2) continue;
    std::map<std::size_t, EnsembleSummary> by_k;
    for (auto p : members) {
      EnsembleSummary s = summaries[p];
      s.comparison_key = key;
      by_k.emplace(std::stoul(points[p].params.at("workers")), std::move(s));
    }
    const auto rep = variance_reduction_report(by_k, problem.oracle.declared_sigma2(), metric);
    json rows = json::array();
    for (const auto& row : rep.rows) {
      rows.push_back({{"workers", row.workers}, {"final", mean_se_json(row.final)}});
    }
    variance.push_back({{"group", key},
                        {"metric", config.report.metric},
                        {"rows", rows},
                        {"exponent", rep.exponent ? json(*rep.exponent) : json(nullptr)},
                        {"applicable", rep.applicable},
                        {"note", rep.note}});
  }
  if (!variance.empty()) {
    write_file(staging / "variance_report.json", json{{"reports", variance}}.dump(2) + "\n");
  }

  json manifest;
  manifest["tool"] = "efsim";
  manifest["version"] = EFSIM_VERSION_STRING;
  manifest["name"] = config.name;
  manifest["config_path"] = config.source.string();
  manifest["config_fingerprint"] = fingerprint;
  manifest["config"] = config.canonical();
  manifest["seeds"] = config.seeds;
  manifest["horizon"] = config.horizon;
  manifest["objective"] = {{"name", problem.objective->name()},
                           {"dim", problem.objective->dim()},
                           {"L", problem.objective->smoothness()},
                           {"mu", problem.objective->mu()},
                           {"f_star", problem.objective->f_star()}};
  manifest["oracle"] = {{"kind", std::string(to_string(problem.oracle.kind()))},
                        {"M", problem.oracle.declared_m()},
                        {"sigma2", problem.oracle.declared_sigma2()},
                        {"noise_distribution",
                         problem.oracle.kind() == NoiseKind::additive ? "gaussian" : "n/a"}};
  manifest["points"] = manifest_points;
  write_file(staging / "manifest.json", manifest.dump(2) + "\n");

  if (fs::exists(final_dir)) fs::remove_all(final_dir);
  fs::rename(staging, final_dir);
  std::ostringstream os;
  os << "wrote " << outcome.trajectory_files << " trajectories and " << outcome.summaries
     << " summaries to " << final_dir.string();
  outcome.message = os.str();
  return outcome;
}

}  // namespace efsim::tools
