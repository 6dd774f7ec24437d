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
// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "efsim/analysis.hpp"
#include "efsim/compressor.hpp"
#include "efsim/engine.hpp"
#include "efsim/objective.hpp"
#include "efsim/oracle.hpp"
#include "efsim/schedule.hpp"
#include "efsim_tools/audit_suites.hpp"
#include "reference.hpp"

using namespace efsim;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<Trajectory> ensemble(const Engine& engine, const Vec& x0, const RunOptions& options,
                                 std::size_t seeds) {
  std::vector<Trajectory> out(seeds);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < seeds;) {
      RunOptions o = options;
      o.seed = i + 1;
      out[i] = run(engine, x0, o);
    }
  };
  const std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < std::min(n, seeds); ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

std::shared_ptr<const Quadratic> reference_quadratic() { return make_quadratic(20, 0.1, 1.0); }

PresetInputs quadratic_inputs(const Objective& f, const Vec& x0, double sigma2, double tau_eff,
                              double workers, std::size_t horizon) {
  PresetInputs in;
  in.smoothness = f.smoothness();
  in.mu = f.mu();
  in.sigma2 = sigma2;
  in.tau_eff = tau_eff;
  in.workers = workers;
  in.dist0_sq = distance_sq(x0, *f.x_star());
  in.subopt0 = f.suboptimality(x0);
  in.horizon = horizon;
  return in;
}

// Runs `seeds` trajectories with the preset tuned for this algorithm and horizon.
EnsembleSummary preset_ensemble(const GradientOracle& oracle, const AlgorithmSpec& spec, Regime regime,
                                const Vec& x0, double sigma2, std::size_t horizon, std::size_t seeds) {
  const auto preset = make_schedule_preset(
      regime, quadratic_inputs(oracle.objective(), x0, sigma2, effective_tau(spec),
                               static_cast<double>(worker_count(spec)), horizon));
  const Engine engine(oracle, spec, preset.stepsize);
  RunOptions o;
  o.horizon = horizon;
  o.record_every = horizon;
  o.weights = preset.weights;
  const auto runs = ensemble(engine, x0, o, seeds);
  return summarize(runs);
}

// 1. x~_t = x_t - e_t along every algorithm, checked from the raw state.
Outcome virtual_iterate_identity() {
  const auto oracle = GradientOracle::additive(reference_quadratic(), 1.0);
  const std::vector<AlgorithmSpec> specs{
      PlainSgd{},
      DelayedSgd{4},
      DelayedSgd{4, DelayModel::iid_bounded},
      CompressedSgd{Compressor::identity()},
      CompressedSgd{Compressor::rand_drop(4.0)},
      CompressedSgd{Compressor::rand_coordinate(0.25)},
      CompressedSgd{Compressor::top_k(5, 20)},
      MiniBatchSgd{4},
      LocalSgd{4, 4},
  };
  double worst = 0.0;
  for (const auto& spec : specs) {
    const double cap = theorem_stepsize_cap(1.0, effective_tau(spec), 0.0);
    const Engine engine(oracle, spec, StepsizeSchedule::constant(cap, cap));
    RunState s = engine.initial_state(Vec::ones(20));
    RunStreams r = engine.make_streams(3);
    for (std::size_t t = 0; t <= 1000; ++t) {
      double diff = 0.0;
      for (std::size_t i = 0; i < 20; ++i) {
        const double d = s.x_tilde[i] - (s.x[i] - s.e[i]);
        diff += d * d;
      }
      worst = std::max(worst, std::sqrt(diff) / (1.0 + norm(s.x)));
      if (t < 1000) engine.step(s, r);
    }
  }
  return {worst <= 1e-10, fmt("max ||x~ - (x - e)|| / (1 + ||x||) = %.2e over %g kinds", worst,
                              static_cast<double>(specs.size()))};
}

// 2. D-SGD tau = 2, gamma = 0.1 on f = x^2 / 2 from x0 = 1.
Outcome hand_unrolled_dsgd() {
  const Engine engine(GradientOracle::deterministic(make_quadratic(1, 1.0, 1.0)), DelayedSgd{2},
                      StepsizeSchedule::constant(0.1), false);
  RunState s = engine.initial_state(Vec{1.0});
  RunStreams r = engine.make_streams(1);
  const std::map<std::size_t, double> x_expected{{3, 0.9}, {4, 0.8}, {5, 0.7}, {6, 0.61}};
  double worst = 0.0;
  for (std::size_t t = 0; t <= 6; ++t) {
    if (auto it = x_expected.find(t); it != x_expected.end()) {
      worst = std::max(worst, std::abs(s.x[0] - it->second));
    }
    if (t == 3) worst = std::max(worst, std::abs(s.e[0] - 0.2));
    if (t < 6) engine.step(s, r);
  }
  return {worst <= 1e-15, fmt("max deviation from x_3..x_6, e_3 = %.1e", worst)};
}

// 3. Contract E||x - C(x)||^2 <= (1 - delta)||x||^2 on all probes at 1e5 trials.
Outcome compressor_contract() {
  constexpr std::size_t d = 16;
  constexpr std::size_t trials = 100000;
  RngStream probe_rng(11, 0, StreamPurpose::probe);
  const auto probes = compressor_probes(d, probe_rng);
  const std::vector<Compressor> ops{Compressor::rand_drop(4.0), Compressor::rand_coordinate(0.25),
                                    Compressor::top_k(1, d), Compressor::top_k(4, d),
                                    Compressor::top_k(16, d)};
  bool ok = true;
  bool exact_ok = true;
  double worst_z = -1e300;
  std::string worst_at;
  for (const auto& c : ops) {
    RngStream rng(12, 0, StreamPurpose::compressor);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto check = check_contract(c, probes[i], trials, rng);
      ok = ok && check.passed;
      exact_ok = exact_ok && check.exact_ratio <= check.bound + 1e-12;
      const double z = check.std_error > 0.0 ? (check.ratio - check.bound) / check.std_error
                                             : (check.ratio > check.bound + 1e-12 ? 1e300 : -1e300);
      if (z > worst_z) {
        worst_z = z;
        worst_at = c.describe() + " probe " + std::to_string(i);
      }
    }
  }

  // Rand-drop: every draw is x or 0, the keep rate is 1/tau, and the closed
  // form equals (1 - 1/tau)||x||^2.
  const Compressor drop = Compressor::rand_drop(4.0);
  RngStream rng(13, 0, StreamPurpose::compressor);
  const Vec& x = probes.back();
  double sq = 0.0;
  for (double v : x) sq += v * v;
  std::size_t kept = 0;
  bool two_outcome = true;
  for (std::size_t i = 0; i < trials; ++i) {
    const Vec y = drop.compress(x, rng);
    if (y == x) {
      ++kept;
    } else if (y != Vec::zeros(d)) {
      two_outcome = false;
    }
  }
  const double p = static_cast<double>(kept) / trials;
  const double se = std::sqrt(0.25 * 0.75 / trials);
  const bool law = two_outcome && std::abs(p - 0.25) <= 3.0 * se &&
                   std::abs(drop.expected_residual(x) - 0.75 * sq) <= 1e-12 * sq;
  return {ok && law,
          fmt("worst (ratio - bound) / se = %.2f", worst_z) + " at " + worst_at +
              (exact_ok ? "; closed form within bound" : "; closed form exceeds bound") +
              fmt("; rand-drop keep rate %.4f", p)};
}

// 4. tau-robust statistical term under the decreasing preset.
Outcome delay_free_stochastic_term() {
  const auto oracle = GradientOracle::additive(reference_quadratic(), 1.0);
  const Vec x0 = Vec::ones(20);
  std::map<std::size_t, double> final;
  for (std::size_t tau : {1u, 16u}) {
    final[tau] = preset_ensemble(oracle, DelayedSgd{tau}, Regime::strongly_convex_decreasing, x0, 1.0,
                                 100000, 20)
                     .final_subopt.mean;
  }
  const double ratio = final[16] / final[1];
  return {ratio <= 2.0, fmt("f(x_T) - f*: tau=16 / tau=1 = %.3f (tau=1: %.3e)", ratio, final[1])};
}

// 5. Deterministic hitting time grows linearly in tau.
Outcome linear_in_tau_deterministic() {
  const auto oracle = GradientOracle::deterministic(reference_quadratic());
  std::map<std::size_t, double> hit;
  for (std::size_t tau : {1u, 2u, 4u, 8u}) {
    const double gamma = 1.0 / (10.0 * tau);
    const Engine engine(oracle, DelayedSgd{tau}, StepsizeSchedule::constant(gamma), false);
    RunOptions o;
    o.horizon = 20000 * tau;
    const auto tr = run(engine, Vec::ones(20), o);
    const auto it = std::find_if(tr.rows.begin(), tr.rows.end(),
                                 [](const MetricRow& r) { return r.subopt <= 1e-6; });
    if (it == tr.rows.end()) return {false, "tau=" + std::to_string(tau) + " never reached 1e-6"};
    hit[tau] = static_cast<double>(it->t);
  }
  double worst = 0.0;
  std::string detail = "hit times";
  for (const auto& [tau, h] : hit) {
    const double rel = (h / hit[1]) / static_cast<double>(tau);
    worst = std::max(worst, std::abs(rel - 1.0));
    detail += " " + std::to_string(static_cast<std::size_t>(h));
  }
  return {worst <= 0.3, detail + fmt("; max |hit(tau)/(tau hit(1)) - 1| = %.3f", worst)};
}

// 6. EC-SGD with rand-drop(8) tracks D-SGD(8).
Outcome ec_matches_dsgd() {
  const auto oracle = GradientOracle::additive(reference_quadratic(), 1.0);
  const Vec x0 = Vec::ones(20);
  const double ec = preset_ensemble(oracle, CompressedSgd{Compressor::rand_drop(8.0)},
                                    Regime::strongly_convex_decreasing, x0, 1.0, 100000, 50)
                        .final_subopt.mean;
  const double ds = preset_ensemble(oracle, DelayedSgd{8}, Regime::strongly_convex_decreasing, x0, 1.0,
                                    100000, 50)
                        .final_subopt.mean;
  const double ratio = std::max(ec, ds) / std::min(ec, ds);
  return {ratio <= 2.0, fmt("EC %.3e vs D-SGD %.3e", ec, ds) + fmt("; ratio %.3f", ratio)};
}

// 7. Local SGD noise term shrinks as 1/K.
Outcome local_sgd_variance_reduction() {
  const auto f = reference_quadratic();
  const auto oracle = GradientOracle::additive(f, 1.0);
  const Vec x0 = *f->x_star() + 0.01 * Vec::ones(20);
  constexpr std::size_t horizon = 512000;
  std::map<std::size_t, EnsembleSummary> by_workers;
  for (std::size_t k : {1u, 4u, 16u}) {
    by_workers[k] = preset_ensemble(oracle, LocalSgd{k, 8}, Regime::strongly_convex_decreasing, x0, 1.0,
                                    horizon, 10);
  }
  const auto report = variance_reduction_report(by_workers, 1.0, FinalMetric::last_iterate);
  if (!report.exponent) return {false, "no exponent: " + report.note};
  const double e = *report.exponent;
  return {e >= -1.3 && e <= -0.7,
          fmt("fitted exponent %.3f (K=1: %.3e)", e, by_workers[1].final_subopt.mean)};
}

// 8. Weakly convex 1/sqrt(T) shape under the tuned constant stepsize.
Outcome weakly_convex_rate() {
  const auto f = make_star_convex_1d();
  const auto oracle = GradientOracle::additive(f, 1.0);
  const Vec x0{2.0};
  std::vector<double> ts;
  std::vector<double> values;
  for (int i = 0; i < 10; ++i) {
    const auto horizon = static_cast<std::size_t>(std::llround(1e4 * std::pow(10.0, i / 9.0)));
    const auto s = preset_ensemble(oracle, PlainSgd{}, Regime::weakly_convex, x0, 1.0, horizon, 50);
    ts.push_back(static_cast<double>(horizon));
    values.push_back(s.weighted_subopt.mean);
  }
  const double slope = loglog_slope(ts, values);
  return {slope >= -0.65 && slope <= -0.35,
          fmt("slope %.3f over T in [1e4, 1e5]; mean f - f* at 1e5: %.3e", slope, values.back())};
}

// 9. Lemma audits over 100 seeds, T = 200.
Outcome lemma_audits() {
  using tools::AuditSuite;
  std::string detail;
  bool ok = true;
  for (auto suite : {AuditSuite::lemma_dsgd, AuditSuite::lemma_ecsgd, AuditSuite::lemma_local,
                     AuditSuite::descent}) {
    tools::AuditOptions o;
    o.trials = 100;
    o.horizon = 200;
    const auto result = tools::run_audit_suite(suite, o);
    ok = ok && result.exit_code == 0;
    detail += (detail.empty() ? "" : ", ") + tools::to_string(suite) +
              (result.exit_code == 0 ? " ok" : " exit " + std::to_string(result.exit_code));
  }
  return {ok, detail};
}

// 10. Engine mini-batch equals the direct implementation bit for bit.
Outcome minibatch_equivalence() {
  const auto oracle = GradientOracle::additive(reference_quadratic(), 1.0);
  constexpr std::size_t tau = 4;
  constexpr std::size_t steps = 10000;
  const Engine engine(oracle, MiniBatchSgd{tau}, StepsizeSchedule::constant(0.01));
  RunState s = engine.initial_state(Vec::ones(20));
  RunStreams r = engine.make_streams(5);
  RngStream direct_rng(5, 0, StreamPurpose::oracle);
  const auto xs = ref::direct_minibatch(oracle, Vec::ones(20), 0.01, tau, steps, direct_rng);
  std::size_t mismatches = 0;
  std::size_t dirty_syncs = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    engine.step(s, r);
    if (!(s.x == xs[t + 1])) ++mismatches;
    if (s.t % tau == 0 && !(s.e == Vec::zeros(20))) ++dirty_syncs;
  }
  return {mismatches == 0 && dirty_syncs == 0,
          std::to_string(mismatches) + " iterate mismatches, " + std::to_string(dirty_syncs) +
              " syncs with e != 0 over 1e4 steps"};
}

// 11. Non-convex stationarity.
Outcome nonconvex_stationarity() {
  const auto f = make_nonconvex_radial(10, 0.0);
  const Vec x0 = 0.9487 * Vec::ones(10);
  const auto oracle = GradientOracle::additive(f, 1.0);
  std::vector<double> means;
  for (std::size_t horizon : {1000u, 10000u, 100000u}) {
    means.push_back(
        preset_ensemble(oracle, DelayedSgd{4}, Regime::nonconvex, x0, 1.0, horizon, 20).mean_grad_norm_sq.mean);
  }
  const bool decreasing = means[0] > means[1] && means[1] > means[2];

  const double cap = theorem_stepsize_cap(f->smoothness(), 4.0, 0.0);
  const Engine engine(GradientOracle::deterministic(f), DelayedSgd{4}, StepsizeSchedule::constant(cap, cap));
  RunOptions o;
  o.horizon = 1000000;
  o.record_every = 100;
  const auto tr = run(engine, x0, o);
  const auto it = std::find_if(tr.rows.begin(), tr.rows.end(),
                               [](const MetricRow& r) { return r.grad_norm_sq <= 1e-6; });
  const bool reached = it != tr.rows.end();
  std::string detail = fmt("mean ||grad||^2 at T=1e3,1e4: %.4f, %.4f", means[0], means[1]) +
                       fmt(", 1e5: %.4f; sigma=0 ", means[2]);
  detail += reached ? "reaches 1e-6 by t=" + std::to_string(it->t) : "never reaches 1e-6";
  return {decreasing && reached, detail};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "virtual-iterate identity", 1.0, virtual_iterate_identity},
      {2, "hand-unrolled D-SGD", 1.0, hand_unrolled_dsgd},
      {3, "compressor contract", 5.0, compressor_contract},
      {4, "delay-free stochastic term", 120.0, delay_free_stochastic_term},
      {5, "linear-in-tau deterministic term", 60.0, linear_in_tau_deterministic},
      {6, "EC-SGD / D-SGD correspondence", 180.0, ec_matches_dsgd},
      {7, "local SGD 1/K statistical term", 180.0, local_sgd_variance_reduction},
      {8, "weakly convex rate shape", 60.0, weakly_convex_rate},
      {9, "lemma audits", 120.0, lemma_audits},
      {10, "mini-batch framework equivalence", 1.0, minibatch_equivalence},
      {11, "non-convex stationarity", 120.0, nonconvex_stationarity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool passed = out.passed && in_time;
    failures += !passed;
    std::printf("%s C%-2d %s: %s (%.2f s, limit %.0f s%s)\n", passed ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
