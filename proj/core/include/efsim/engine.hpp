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
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "efsim/compressor.hpp"
#include "efsim/oracle.hpp"
#include "efsim/rng.hpp"
#include "efsim/schedule.hpp"
#include "efsim/vec.hpp"

namespace efsim {

struct PlainSgd {};

enum class DelayModel {
  fixed,        // every gradient is applied exactly tau steps later
  iid_bounded,  // delay ~ U{0, ..., tau}, all due gradients applied together
};

struct DelayedSgd {
  std::size_t tau = 1;
  DelayModel model = DelayModel::fixed;
};

struct CompressedSgd {
  Compressor compressor = Compressor::identity();
};

// gamma_t is the per-gradient stepsize: a full batch of tau gradients moves
// x by sum_i gamma_i g_i.
struct MiniBatchSgd {
  std::size_t tau = 1;
};

struct LocalSgd {
  std::size_t workers = 1;
  std::size_t tau = 1;
};

using AlgorithmSpec = std::variant<PlainSgd, DelayedSgd, CompressedSgd, MiniBatchSgd, LocalSgd>;

enum class AlgorithmKind { plain_sgd, d_sgd, ec_sgd, minibatch, local_sgd };

AlgorithmKind kind_of(const AlgorithmSpec& spec) noexcept;
std::string_view to_string(AlgorithmKind kind);
std::string describe(const AlgorithmSpec& spec);
// tau for D-SGD and mini-batch, 2/delta for EC-SGD, tau K for local SGD, 1 for SGD.
double effective_tau(const AlgorithmSpec& spec);
std::size_t worker_count(const AlgorithmSpec& spec) noexcept;

struct PendingUpdate {
  std::size_t due;  // iteration whose v_t includes this update
  Vec update;       // gamma_s g_s
};

// The framework triple (x_t, e_t, x_tilde_t) plus algorithm buffers.
// For local SGD, x_t is the last synchronized model, e_t the local progress
// not yet averaged into it, and x_tilde_t the worker mean.
struct RunState {
  std::size_t t = 0;
  Vec x;
  Vec e;
  Vec x_tilde;
  std::vector<PendingUpdate> pending;  // D-SGD
  std::vector<Vec> workers;            // local SGD: x_t^k

  // Scratch, reused across steps.
  Vec g;
  Vec grad;
  Vec w;
  Vec v;
  std::vector<Vec> spare;

  explicit RunState(const Vec& x0);
};

// Independent streams for one run, all derived from the run seed.
struct RunStreams {
  std::vector<RngStream> oracle;  // one per worker
  RngStream compressor;
  RngStream delay;

  RunStreams(std::uint64_t seed, std::size_t workers);
};

struct StepRecord {
  double gamma = 0.0;
  // ||grad f(x_t)||^2 at the pre-step iterate; mean over workers for local SGD.
  double grad_norm_sq = 0.0;
};

// One framework step:
//   w = e_t + gamma_t g_t,  v_t chosen by the algorithm,
//   e_{t+1} = w - v_t,  x_{t+1} = x_t - v_t,  x_tilde_{t+1} = x_tilde_t - gamma_t g_t.
// Immutable; all mutable data lives in RunState and RunStreams.
class Engine {
 public:
  // Throws configuration_rejected when enforce_caps is set and the stepsize
  // schedule exceeds its cap.
  Engine(GradientOracle oracle, AlgorithmSpec spec, StepsizeSchedule stepsize,
         bool enforce_caps = true);

  const GradientOracle& oracle() const noexcept { return oracle_; }
  const Objective& objective() const noexcept { return oracle_.objective(); }
  const AlgorithmSpec& spec() const noexcept { return spec_; }
  AlgorithmKind kind() const noexcept { return kind_of(spec_); }
  const StepsizeSchedule& stepsize() const noexcept { return stepsize_; }
  std::size_t workers() const noexcept { return worker_count(spec_); }

  RunState initial_state(const Vec& x0) const;
  RunStreams make_streams(std::uint64_t seed) const { return RunStreams(seed, workers()); }

  StepRecord step(RunState& state, RunStreams& streams) const;

  // Point whose suboptimality the theorems bound: x_t, or the worker mean.
  const Vec& model(const RunState& state) const noexcept;
  // f(x_t) - f*, averaged over workers for local SGD.
  double suboptimality(const RunState& state) const;
  // (1/K) sum_k ||x_t^k - x_tilde_t||^2; 0 unless local SGD.
  double mean_dispersion_sq(const RunState& state) const;
  // max_k ||x_t^k - x_tilde_t||; 0 unless local SGD.
  double max_dispersion(const RunState& state) const;

 private:
  void step_local(RunState& state, RunStreams& streams, double gamma, StepRecord& rec) const;

  GradientOracle oracle_;
  AlgorithmSpec spec_;
  StepsizeSchedule stepsize_;
  bool enforce_caps_;
};

// ||x_tilde_t - (x_t - e_t)||.
double consistency_residual(const RunState& state);

// Sum of all queued D-SGD updates; equals e_t in exact arithmetic.
Vec pending_error(const RunState& state);

struct MetricRow {
  std::size_t t = 0;
  double subopt = 0.0;
  double grad_norm_sq = 0.0;
  double err_norm_sq = 0.0;
  double consistency_residual = 0.0;
  double worker_dispersion = 0.0;
};

struct RunOptions {
  std::size_t horizon = 1;  // T
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  WeightSchedule weights = WeightSchedule::uniform();
  double divergence_threshold = 1e12;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::vector<MetricRow> rows;
  Vec x_final{1};
  Vec x_bar{1};                       // weighted average of x_0..x_T
  double final_subopt = 0.0;          // at x_T
  double averaged_subopt = 0.0;       // f(x_bar) - f*
  double weighted_subopt = 0.0;       // (1/W_T) sum_t w_t (f(x_t) - f*)
  double mean_grad_norm_sq = 0.0;     // (1/(T+1)) sum_t ||grad f(x_t)||^2
  double max_relative_consistency = 0.0;  // max_t residual / (1 + ||x_t||)
};

// Runs T steps from x0. Rows are recorded at multiples of record_every and
// at T. Throws DivergenceError on NaN or suboptimality above the threshold.
Trajectory run(const Engine& engine, const Vec& x0, const RunOptions& options);

}  // namespace efsim
