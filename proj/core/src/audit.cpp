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
#include "efsim/audit.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "efsim/error.hpp"
#include "efsim/running_stats.hpp"

namespace efsim {

std::string_view to_string(LemmaKind lemma) {
  switch (lemma) {
    case LemmaKind::dsgd_error:
      return "dsgd-error";
    case LemmaKind::ecsgd_error:
      return "ecsgd-error";
    case LemmaKind::local_dispersion:
      return "local-dispersion";
    case LemmaKind::descent_strong:
      return "descent-strong";
    case LemmaKind::descent_nonconvex:
      return "descent-nonconvex";
  }
  return "unknown";
}

namespace {

[[noreturn]] void reject(LemmaKind lemma, const std::string& why) {
  throw Error(ErrorCode::configuration_rejected,
              std::string(to_string(lemma)) + " audit rejected: " + why);
}

void require_kind(LemmaKind lemma, const Engine& engine, AlgorithmKind expected) {
  if (engine.kind() != expected) {
    reject(lemma, "needs " + std::string(to_string(expected)) + ", got " +
                      describe(engine.spec()));
  }
}

void require_cap(LemmaKind lemma, const Engine& engine, double cap) {
  const double gamma0 = engine.stepsize().at(0);
  if (gamma0 > cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(6);
    os << "stepsize " << gamma0 << " exceeds " << cap;
    reject(lemma, os.str());
  }
}

void require_slow_squares(LemmaKind lemma, const Engine& engine, double tau,
                          std::size_t horizon) {
  std::vector<double> sq = engine.stepsize().values(std::max<std::size_t>(horizon + 1, 2));
  for (double& g : sq) g *= g;
  if (!is_tau_slow_decreasing(sq, tau)) reject(lemma, "squared stepsizes are not tau-slow");
}

}  // namespace

void check_lemma_preconditions(LemmaKind lemma, const Engine& engine, std::size_t horizon) {
  const GradientOracle& oracle = engine.oracle();
  if (oracle.assumption() != NoiseAssumption::general) {
    reject(lemma, "oracle only certifies the weak noise bound");
  }
  const double l = engine.objective().smoothness();
  const double m = oracle.declared_m();
  const double k = static_cast<double>(engine.workers());
  switch (lemma) {
    case LemmaKind::dsgd_error: {
      require_kind(lemma, engine, AlgorithmKind::d_sgd);
      const double tau = static_cast<double>(std::get<DelayedSgd>(engine.spec()).tau);
      require_cap(lemma, engine, theorem_stepsize_cap(l, tau, m));
      require_slow_squares(lemma, engine, tau, horizon);
      break;
    }
    case LemmaKind::ecsgd_error: {
      require_kind(lemma, engine, AlgorithmKind::ec_sgd);
      const double tau = effective_tau(engine.spec());
      require_cap(lemma, engine, theorem_stepsize_cap(l, tau, m));
      require_slow_squares(lemma, engine, tau, horizon);
      break;
    }
    case LemmaKind::local_dispersion: {
      require_kind(lemma, engine, AlgorithmKind::local_sgd);
      const double tau = static_cast<double>(std::get<LocalSgd>(engine.spec()).tau);
      require_cap(lemma, engine, theorem_stepsize_cap(l, effective_tau(engine.spec()), m));
      require_slow_squares(lemma, engine, tau, horizon);
      break;
    }
    case LemmaKind::descent_strong:
      if (engine.objective().convexity() == ConvexityClass::non_convex) {
        reject(lemma, "objective is not quasi-convex");
      }
      if (!engine.objective().x_star()) reject(lemma, "objective has no known minimizer");
      require_cap(lemma, engine, k / (4.0 * l * (k + m)));
      break;
    case LemmaKind::descent_nonconvex:
      require_cap(lemma, engine, k / (2.0 * l * (k + m)));
      break;
  }
}

namespace {

// Sliding window sum of the last `size` values.
class Window {
 public:
  explicit Window(std::size_t size) : size_(size) {}
  void push(double v) {
    values_.push_back(v);
    if (values_.size() > size_) values_.pop_front();
  }
  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

 private:
  std::size_t size_;
  std::deque<double> values_;
};

struct PointStats {
  RunningStats lhs;
  RunningStats rhs;
  RunningStats slack;
  double scale = 0.0;  // max |lhs| + |rhs| seen, for the rounding allowance

  void push(double l, double r) {
    lhs.push(l);
    rhs.push(r);
    slack.push(r - l);
    scale = std::max(scale, std::abs(l) + std::abs(r));
  }
};

// Runs one seed and feeds (lhs, rhs) for t = 0..T-1 into stats.
void audit_seed(LemmaKind lemma, const Engine& engine, const Vec& x0, std::uint64_t seed,
                std::size_t horizon, std::vector<PointStats>& stats) {
  const Objective& f = engine.objective();
  const double l = f.smoothness();
  const double mu = f.mu();
  const double sigma2 = engine.oracle().declared_sigma2();
  const double k = static_cast<double>(engine.workers());
  const bool local = engine.kind() == AlgorithmKind::local_sgd;

  RunState state = engine.initial_state(x0);
  RunStreams streams = engine.make_streams(seed);

  std::size_t window_size = 1;
  if (lemma == LemmaKind::dsgd_error) window_size = std::get<DelayedSgd>(engine.spec()).tau;
  if (lemma == LemmaKind::local_dispersion) window_size = std::get<LocalSgd>(engine.spec()).tau;
  Window window(window_size);
  double geometric = 0.0;
  const double delta =
      lemma == LemmaKind::ecsgd_error ? std::get<CompressedSgd>(engine.spec()).compressor.delta() : 1.0;

  const auto dispersion = [&]() {
    return local ? engine.mean_dispersion_sq(state) : norm_sq(state.e);
  };
  const Vec& x_star = lemma == LemmaKind::descent_strong ? *f.x_star() : x0;

  for (std::size_t t = 0; t < horizon; ++t) {
    switch (lemma) {
      case LemmaKind::dsgd_error: {
        const double lhs = 3.0 * l * norm_sq(state.e);
        const double gamma = engine.stepsize().at(t);
        const double rhs = window.sum() / (16.0 * l * static_cast<double>(window_size)) +
                           gamma * sigma2;
        stats[t].push(lhs, rhs);
        window.push(engine.step(state, streams).grad_norm_sq);
        break;
      }
      case LemmaKind::ecsgd_error: {
        const StepRecord rec = engine.step(state, streams);
        geometric = (1.0 - delta / 4.0) * geometric + rec.grad_norm_sq;
        const double lhs = 3.0 * l * norm_sq(state.e);
        const double rhs = delta / (64.0 * l) * geometric + rec.gamma * sigma2;
        stats[t].push(lhs, rhs);
        break;
      }
      case LemmaKind::local_dispersion: {
        const double lhs = 3.0 * l * engine.mean_dispersion_sq(state);
        const StepRecord rec = engine.step(state, streams);
        window.push(k * rec.grad_norm_sq);
        const double rhs = window.sum() / (16.0 * l * static_cast<double>(window_size) * k) +
                           rec.gamma * sigma2 / k;
        stats[t].push(lhs, rhs);
        break;
      }
      case LemmaKind::descent_strong: {
        const double dist = distance_sq(state.x_tilde, x_star);
        const double subopt = engine.suboptimality(state);
        const double disp = dispersion();
        const StepRecord rec = engine.step(state, streams);
        const double g = rec.gamma;
        const double lhs = distance_sq(state.x_tilde, x_star);
        const double rhs = (1.0 - mu * g / 2.0) * dist - g / 2.0 * subopt +
                           g * g * sigma2 / k + 3.0 * l * g * disp;
        stats[t].push(lhs, rhs);
        break;
      }
      case LemmaKind::descent_nonconvex: {
        const double f_tilde = f.suboptimality(state.x_tilde);
        const double disp = dispersion();
        const StepRecord rec = engine.step(state, streams);
        const double g = rec.gamma;
        const double lhs = f.suboptimality(state.x_tilde);
        const double rhs = f_tilde - g / 4.0 * rec.grad_norm_sq + g * g * l * sigma2 / (2.0 * k) +
                           g * l * l / 2.0 * disp;
        stats[t].push(lhs, rhs);
        break;
      }
    }
  }
}

}  // namespace

LemmaAuditReport audit_lemma(LemmaKind lemma, const Engine& engine, const Vec& x0,
                             std::size_t seeds, std::size_t horizon, std::uint64_t base_seed) {
  if (seeds < 2) throw_invalid("lemma audits need at least two seeds");
  if (horizon < 1) throw_invalid("lemma audits need T >= 1");
  check_lemma_preconditions(lemma, engine, horizon);

  std::vector<PointStats> stats(horizon);
  for (std::size_t s = 0; s < seeds; ++s) {
    audit_seed(lemma, engine, x0, base_seed + s, horizon, stats);
  }

  LemmaAuditReport report;
  report.lemma = lemma;
  report.algorithm = describe(engine.spec());
  report.seeds = seeds;
  report.horizon = horizon;
  report.points.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const PointStats& ps = stats[t];
    AuditPoint p;
    p.t = t;
    p.lhs = ps.lhs.mean();
    p.rhs = ps.rhs.mean();
    p.slack = ps.slack.mean();
    p.std_error = ps.slack.std_error();
    // Rounding allowance for deterministic runs where both sides coincide.
    p.passed = p.slack >= -3.0 * p.std_error - 1e-12 * ps.scale;
    if (!p.passed) ++report.failures;
    report.points.push_back(p);
  }
  return report;
}

}  // namespace efsim
