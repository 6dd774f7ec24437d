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
#include "efsim/engine.hpp"

#include <cmath>
#include <sstream>

#include "efsim/error.hpp"

namespace efsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const AlgorithmSpec& spec) {
  std::visit(Overloaded{
                 [](const PlainSgd&) {},
                 [](const DelayedSgd& a) {
                   if (a.tau < 1) throw_invalid("d-sgd needs tau >= 1");
                 },
                 [](const CompressedSgd&) {},
                 [](const MiniBatchSgd& a) {
                   if (a.tau < 1) throw_invalid("minibatch needs tau >= 1");
                 },
                 [](const LocalSgd& a) {
                   if (a.workers < 1) throw_invalid("local-sgd needs K >= 1");
                   if (a.tau < 1) throw_invalid("local-sgd needs tau >= 1");
                 },
             },
             spec);
}

}  // namespace

AlgorithmKind kind_of(const AlgorithmSpec& spec) noexcept {
  return static_cast<AlgorithmKind>(spec.index());
}

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::plain_sgd:
      return "sgd";
    case AlgorithmKind::d_sgd:
      return "dsgd";
    case AlgorithmKind::ec_sgd:
      return "ecsgd";
    case AlgorithmKind::minibatch:
      return "minibatch";
    case AlgorithmKind::local_sgd:
      return "local";
  }
  return "unknown";
}

std::string describe(const AlgorithmSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PlainSgd&) { os << "sgd"; },
                 [&](const DelayedSgd& a) {
                   os << "dsgd(tau=" << a.tau << ", delay="
                      << (a.model == DelayModel::fixed ? "fixed" : "iid-bounded") << ")";
                 },
                 [&](const CompressedSgd& a) { os << "ecsgd(" << a.compressor.describe() << ")"; },
                 [&](const MiniBatchSgd& a) { os << "minibatch(tau=" << a.tau << ")"; },
                 [&](const LocalSgd& a) { os << "local(K=" << a.workers << ", tau=" << a.tau << ")"; },
             },
             spec);
  return os.str();
}

double effective_tau(const AlgorithmSpec& spec) {
  return std::visit(Overloaded{
                        [](const PlainSgd&) { return 1.0; },
                        [](const DelayedSgd& a) { return static_cast<double>(a.tau); },
                        [](const CompressedSgd& a) { return 2.0 / a.compressor.delta(); },
                        [](const MiniBatchSgd& a) { return static_cast<double>(a.tau); },
                        [](const LocalSgd& a) {
                          return static_cast<double>(a.tau) * static_cast<double>(a.workers);
                        },
                    },
                    spec);
}

std::size_t worker_count(const AlgorithmSpec& spec) noexcept {
  if (const auto* local = std::get_if<LocalSgd>(&spec)) return local->workers;
  return 1;
}

RunState::RunState(const Vec& x0)
    : x(x0),
      e(x0.size()),
      x_tilde(x0),
      g(x0.size()),
      grad(x0.size()),
      w(x0.size()),
      v(x0.size()) {}

RunStreams::RunStreams(std::uint64_t seed, std::size_t workers)
    : compressor(seed, 0, StreamPurpose::compressor), delay(seed, 0, StreamPurpose::delay) {
  oracle.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) {
    oracle.emplace_back(seed, static_cast<std::uint32_t>(k), StreamPurpose::oracle);
  }
}

Engine::Engine(GradientOracle oracle, AlgorithmSpec spec, StepsizeSchedule stepsize,
               bool enforce_caps)
    : oracle_(std::move(oracle)),
      spec_(std::move(spec)),
      stepsize_(stepsize),
      enforce_caps_(enforce_caps) {
  validate(spec_);
  if (const auto* ec = std::get_if<CompressedSgd>(&spec_)) {
    if (ec->compressor.kind() == CompressorKind::top_k && ec->compressor.dim() != objective().dim()) {
      throw_invalid("top-k dimension does not match the objective");
    }
  }
  if (enforce_caps_ && !stepsize_.within_cap()) {
    std::ostringstream os;
    os.precision(6);
    os << "stepsize " << stepsize_.at(0) << " exceeds the theorem cap " << stepsize_.cap()
       << " for " << describe(spec_);
    throw Error(ErrorCode::configuration_rejected, os.str());
  }
}

RunState Engine::initial_state(const Vec& x0) const {
  if (x0.size() != objective().dim()) throw_invalid("x0 dimension does not match the objective");
  RunState s(x0);
  if (kind() == AlgorithmKind::local_sgd) s.workers.assign(workers(), x0);
  return s;
}

namespace {

Vec take_spare(RunState& s) {
  if (s.spare.empty()) return Vec(s.x.size());
  Vec out = std::move(s.spare.back());
  s.spare.pop_back();
  return out;
}

}  // namespace

StepRecord Engine::step(RunState& s, RunStreams& streams) const {
  StepRecord rec;
  const double gamma = stepsize_.at(s.t);
  rec.gamma = gamma;
  if (kind() == AlgorithmKind::local_sgd) {
    step_local(s, streams, gamma, rec);
    ++s.t;
    return rec;
  }

  const std::size_t d = s.x.size();
  oracle_.sample(s.x, streams.oracle[0], s.g, s.grad);
  rec.grad_norm_sq = norm_sq(s.grad);
  for (std::size_t i = 0; i < d; ++i) s.w[i] = s.e[i] + gamma * s.g[i];

  std::visit(Overloaded{
                 [&](const PlainSgd&) { std::copy(s.w.begin(), s.w.end(), s.v.begin()); },
                 [&](const DelayedSgd& a) {
                   Vec update = take_spare(s);
                   for (std::size_t i = 0; i < d; ++i) update[i] = gamma * s.g[i];
                   const std::size_t delay = a.model == DelayModel::fixed
                                                 ? a.tau
                                                 : streams.delay.uniform_index(a.tau + 1);
                   s.pending.push_back({s.t + delay, std::move(update)});
                   s.v.fill(0.0);
                   std::size_t kept = 0;
                   for (std::size_t j = 0; j < s.pending.size(); ++j) {
                     if (s.pending[j].due <= s.t) {
                       s.v += s.pending[j].update;
                       s.spare.push_back(std::move(s.pending[j].update));
                     } else {
                       if (kept != j) s.pending[kept] = std::move(s.pending[j]);
                       ++kept;
                     }
                   }
                   while (s.pending.size() > kept) s.pending.pop_back();
                 },
                 [&](const CompressedSgd& a) { a.compressor.compress(s.w, streams.compressor, s.v); },
                 [&](const MiniBatchSgd& a) {
                   if ((s.t + 1) % a.tau == 0) {
                     std::copy(s.w.begin(), s.w.end(), s.v.begin());
                   } else {
                     s.v.fill(0.0);
                   }
                 },
                 [](const LocalSgd&) {},
             },
             spec_);

  for (std::size_t i = 0; i < d; ++i) {
    s.e[i] = s.w[i] - s.v[i];
    s.x[i] -= s.v[i];
    s.x_tilde[i] -= gamma * s.g[i];
  }
  ++s.t;
  return rec;
}

void Engine::step_local(RunState& s, RunStreams& streams, double gamma, StepRecord& rec) const {
  const auto& spec = std::get<LocalSgd>(spec_);
  const std::size_t d = s.x.size();
  const std::size_t k_count = s.workers.size();

  // v accumulates sum_k g_t^k before it becomes the applied update.
  s.v.fill(0.0);
  double grad_acc = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    Vec& xk = s.workers[k];
    oracle_.sample(xk, streams.oracle[k], s.g, s.grad);
    grad_acc += norm_sq(s.grad);
    for (std::size_t i = 0; i < d; ++i) {
      xk[i] -= gamma * s.g[i];
      s.v[i] += s.g[i];
    }
  }
  rec.grad_norm_sq = grad_acc / static_cast<double>(k_count);

  const double scale = gamma / static_cast<double>(k_count);
  for (std::size_t i = 0; i < d; ++i) {
    const double delta = scale * s.v[i];
    s.w[i] = s.e[i] + delta;
    s.x_tilde[i] -= delta;
  }

  if ((s.t + 1) % spec.tau == 0) {
    const double inv = static_cast<double>(k_count);
    for (std::size_t i = 0; i < d; ++i) {
      double sum = 0.0;
      for (const Vec& xk : s.workers) sum += xk[i];
      const double mean = sum / inv;
      for (Vec& xk : s.workers) xk[i] = mean;
    }
    std::copy(s.w.begin(), s.w.end(), s.v.begin());
  } else {
    s.v.fill(0.0);
  }
  for (std::size_t i = 0; i < d; ++i) {
    s.e[i] = s.w[i] - s.v[i];
    s.x[i] -= s.v[i];
  }
}

const Vec& Engine::model(const RunState& state) const noexcept {
  return kind() == AlgorithmKind::local_sgd ? state.x_tilde : state.x;
}

double Engine::suboptimality(const RunState& state) const {
  if (kind() != AlgorithmKind::local_sgd) return objective().suboptimality(state.x);
  double acc = 0.0;
  for (const Vec& xk : state.workers) acc += objective().suboptimality(xk);
  return acc / static_cast<double>(state.workers.size());
}

double Engine::mean_dispersion_sq(const RunState& state) const {
  if (state.workers.empty()) return 0.0;
  double acc = 0.0;
  for (const Vec& xk : state.workers) acc += distance_sq(xk, state.x_tilde);
  return acc / static_cast<double>(state.workers.size());
}

double Engine::max_dispersion(const RunState& state) const {
  double worst = 0.0;
  for (const Vec& xk : state.workers) worst = std::max(worst, distance_sq(xk, state.x_tilde));
  return std::sqrt(worst);
}

double consistency_residual(const RunState& state) {
  double acc = 0.0;
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    const double r = state.x_tilde[i] - (state.x[i] - state.e[i]);
    acc += r * r;
  }
  return std::sqrt(acc);
}

Vec pending_error(const RunState& state) {
  Vec sum(state.x.size());
  for (const auto& p : state.pending) sum += p.update;
  return sum;
}

namespace {

double model_grad_norm_sq(const Engine& engine, const RunState& state) {
  const Objective& f = engine.objective();
  if (state.workers.empty()) return norm_sq(f.gradient(state.x));
  double acc = 0.0;
  for (const Vec& xk : state.workers) acc += norm_sq(f.gradient(xk));
  return acc / static_cast<double>(state.workers.size());
}

}  // namespace

Trajectory run(const Engine& engine, const Vec& x0, const RunOptions& options) {
  if (options.horizon < 1) throw_invalid("horizon T must be >= 1");
  if (options.record_every < 1) throw_invalid("record_every must be >= 1");
  const Objective& f = engine.objective();

  Trajectory tr;
  tr.seed = options.seed;
  tr.horizon = options.horizon;
  RunState state = engine.initial_state(x0);
  RunStreams streams = engine.make_streams(options.seed);
  WeightedAverager x_avg(options.weights);
  WeightedAverager subopt_avg(options.weights);
  double grad_sum = 0.0;

  for (std::size_t t = 0; t <= options.horizon; ++t) {
    const double subopt = engine.suboptimality(state);
    if (!std::isfinite(subopt) || subopt > options.divergence_threshold) {
      throw DivergenceError(t, subopt);
    }
    const double residual = consistency_residual(state);
    tr.max_relative_consistency =
        std::max(tr.max_relative_consistency, residual / (1.0 + norm(state.x)));
    x_avg.push(engine.model(state));
    subopt_avg.push(subopt);

    const bool record = t % options.record_every == 0 || t == options.horizon;
    MetricRow row;
    if (record) {
      row.t = t;
      row.subopt = subopt;
      row.err_norm_sq = norm_sq(state.e);
      row.consistency_residual = residual;
      row.worker_dispersion = engine.max_dispersion(state);
    }

    double grad_sq = 0.0;
    if (t < options.horizon) {
      grad_sq = engine.step(state, streams).grad_norm_sq;
    } else {
      grad_sq = model_grad_norm_sq(engine, state);
    }
    if (!std::isfinite(grad_sq)) throw DivergenceError(t, subopt);
    grad_sum += grad_sq;
    if (record) {
      row.grad_norm_sq = grad_sq;
      tr.rows.push_back(row);
    }
  }

  tr.x_final = engine.model(state);
  tr.x_bar = x_avg.vector_average();
  tr.final_subopt = engine.suboptimality(state);
  tr.averaged_subopt = f.suboptimality(tr.x_bar);
  tr.weighted_subopt = subopt_avg.scalar_average();
  tr.mean_grad_norm_sq = grad_sum / static_cast<double>(options.horizon + 1);
  return tr;
}

}  // namespace efsim
