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
#include "efsim/schedule.hpp"

#include <cmath>

#include "efsim/error.hpp"
#include "efsim/format.hpp"

namespace efsim {

namespace {

// Relative slack for comparisons that hold with equality in exact arithmetic.
constexpr double kRelTol = 1e-12;

}  // namespace

StepsizeSchedule StepsizeSchedule::constant(double gamma, double cap) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw_invalid("stepsize must be positive");
  StepsizeSchedule s;
  s.kind_ = StepsizeKind::constant;
  s.gamma_ = gamma;
  s.cap_ = cap;
  return s;
}

StepsizeSchedule StepsizeSchedule::inverse_time(double mu, double kappa, double cap) {
  if (!(mu > 0.0)) throw Error(ErrorCode::requires_strong_convexity, "inverse-time stepsizes need mu > 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw_invalid("kappa must be positive");
  StepsizeSchedule s;
  s.kind_ = StepsizeKind::inverse_time;
  s.numerator_ = 4.0 / mu;
  s.kappa_ = kappa;
  s.gamma_ = s.numerator_ / kappa;
  s.cap_ = cap;
  return s;
}

double StepsizeSchedule::at(std::size_t t) const noexcept {
  if (kind_ == StepsizeKind::constant) return gamma_;
  return numerator_ / (kappa_ + static_cast<double>(t));
}

std::vector<double> StepsizeSchedule::values(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t t = 0; t < count; ++t) out[t] = at(t);
  return out;
}

bool StepsizeSchedule::within_cap() const noexcept {
  // Non-increasing, so gamma_0 is the largest value.
  return at(0) <= cap_ * (1.0 + kRelTol);
}

StepsizeSchedule StepsizeSchedule::with_cap(double cap) const {
  StepsizeSchedule s = *this;
  s.cap_ = cap;
  return s;
}

std::string StepsizeSchedule::describe() const {
  if (kind_ == StepsizeKind::constant) return "constant(gamma=" + shortest(gamma_) + ")";
  return "inverse-time(c=" + shortest(numerator_) + ", kappa=" + shortest(kappa_) + ")";
}

WeightSchedule WeightSchedule::uniform() { return WeightSchedule(); }

WeightSchedule WeightSchedule::linear(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw_invalid("linear weights need kappa > 0");
  WeightSchedule w;
  w.kind_ = WeightKind::linear;
  w.kappa_ = kappa;
  return w;
}

WeightSchedule WeightSchedule::exponential(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw_invalid("exponential weights need rho in (0, 1]");
  WeightSchedule w;
  w.kind_ = WeightKind::exponential;
  w.rho_ = rho;
  return w;
}

double WeightSchedule::at(std::size_t t) const {
  switch (kind_) {
    case WeightKind::uniform:
      return 1.0;
    case WeightKind::linear:
      return kappa_ + static_cast<double>(t);
    case WeightKind::exponential:
      return std::pow(rho_, -static_cast<double>(t + 1));
  }
  return 1.0;
}

double WeightSchedule::ratio(std::size_t t) const noexcept {
  switch (kind_) {
    case WeightKind::uniform:
      return 1.0;
    case WeightKind::linear:
      return (kappa_ + static_cast<double>(t) - 1.0) / (kappa_ + static_cast<double>(t));
    case WeightKind::exponential:
      return rho_;
  }
  return 1.0;
}

std::vector<double> WeightSchedule::values(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t t = 0; t < count; ++t) out[t] = at(t);
  return out;
}

std::string WeightSchedule::describe() const {
  switch (kind_) {
    case WeightKind::linear:
      return "linear(kappa=" + shortest(kappa_) + ")";
    case WeightKind::exponential:
      return "exponential(rho=" + shortest(rho_) + ")";
    default:
      return "uniform";
  }
}

double WeightedAverager::next_fraction() {
  if (count_ > 0) ratio_acc_ = (ratio_acc_ + 1.0) * weights_.ratio(count_);
  ++count_;
  return 1.0 / (1.0 + ratio_acc_);
}

void WeightedAverager::push(const Vec& x) {
  const double frac = next_fraction();
  if (!avg_) {
    avg_ = x;
    return;
  }
  Vec& avg = *avg_;
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += frac * (x[i] - avg[i]);
}

void WeightedAverager::push(double value) {
  const double frac = next_fraction();
  scalar_ = count_ == 1 ? value : scalar_ + frac * (value - scalar_);
}

const Vec& WeightedAverager::vector_average() const {
  if (!avg_) throw_invalid("weighted average of an empty sequence");
  return *avg_;
}

Vec weighted_average(std::span<const Vec> points, const WeightSchedule& weights) {
  if (points.empty()) throw_invalid("weighted average of an empty sequence");
  WeightedAverager avg(weights);
  for (const Vec& x : points) avg.push(x);
  return avg.vector_average();
}

namespace {

void require_positive_sequence(std::span<const double> seq, double tau) {
  if (seq.size() < 2) throw_invalid("tau-slow check needs at least two values");
  if (!(tau > 0.0)) throw_invalid("tau must be positive");
  for (double a : seq) {
    if (!(a > 0.0) || !std::isfinite(a)) throw_invalid("tau-slow check needs positive entries");
  }
}

}  // namespace

bool is_tau_slow_decreasing(std::span<const double> seq, double tau) {
  require_positive_sequence(seq, tau);
  const double growth = 1.0 + 1.0 / (2.0 * tau);
  for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
    const double a = seq[t];
    const double next = seq[t + 1];
    if (next > a * (1.0 + kRelTol)) return false;
    if (next * growth < a * (1.0 - kRelTol)) return false;
  }
  return true;
}

bool is_tau_slow_increasing(std::span<const double> seq, double tau) {
  require_positive_sequence(seq, tau);
  std::vector<double> inv(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) inv[t] = 1.0 / seq[t];
  return is_tau_slow_decreasing(inv, tau);
}

double theorem_kappa(double smoothness, double mu, double tau_eff, double m) {
  if (!(mu > 0.0)) throw Error(ErrorCode::requires_strong_convexity, "kappa needs mu > 0");
  if (!(tau_eff >= 1.0)) throw_invalid("tau_eff must be >= 1");
  if (!(m >= 0.0)) throw_invalid("M must be >= 0");
  if (!(smoothness >= mu)) throw_invalid("L must be >= mu");
  return 40.0 * smoothness * (tau_eff + m) / mu;
}

double theorem_stepsize_cap(double smoothness, double tau_eff, double m) {
  if (!(smoothness > 0.0)) throw_invalid("L must be positive");
  if (!(tau_eff >= 1.0)) throw_invalid("tau_eff must be >= 1");
  if (!(m >= 0.0)) throw_invalid("M must be >= 0");
  return 1.0 / (10.0 * smoothness * (tau_eff + m));
}

double tune_constant_stepsize(double r0, double c, double d_cap, std::size_t horizon) {
  if (!(r0 >= 0.0) || !(c >= 0.0) || !(d_cap > 0.0)) throw_invalid("tuner needs r0, c >= 0 and d > 0");
  const double cap = 1.0 / d_cap;
  if (c == 0.0) return cap;
  return std::min(cap, std::sqrt(r0 / (c * (static_cast<double>(horizon) + 1.0))));
}

double tune_strongly_convex_stepsize(double r0, double c, double a, double d_cap,
                                     std::size_t horizon) {
  if (!(r0 >= 0.0) || !(c >= 0.0) || !(a > 0.0) || !(d_cap >= a)) {
    throw_invalid("tuner needs r0, c >= 0 and d >= a > 0");
  }
  const double cap = 1.0 / d_cap;
  if (c == 0.0 || horizon == 0) return cap;
  const double t = static_cast<double>(horizon);
  const double arg = std::max(std::exp(1.0), a * a * r0 * t * t / c);
  return std::min(cap, std::log(arg) / (a * t));
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::strongly_convex_decreasing:
      return "strongly-convex-decreasing";
    case Regime::strongly_convex_constant:
      return "strongly-convex-constant";
    case Regime::weakly_convex:
      return "weakly-convex";
    case Regime::nonconvex:
      return "nonconvex";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  for (Regime r : {Regime::strongly_convex_decreasing, Regime::strongly_convex_constant,
                   Regime::weakly_convex, Regime::nonconvex}) {
    if (to_string(r) == name) return r;
  }
  throw_invalid("unknown schedule regime '" + std::string(name) + "'");
}

SchedulePreset make_schedule_preset(Regime regime, const PresetInputs& in) {
  if (!(in.workers >= 1.0)) throw_invalid("workers must be >= 1");
  SchedulePreset p;
  p.regime = regime;
  p.tau_eff = in.tau_eff;
  p.cap = theorem_stepsize_cap(in.smoothness, in.tau_eff, in.m);
  const double d_cap = 1.0 / p.cap;
  const double noise = in.sigma2 / in.workers;
  switch (regime) {
    case Regime::strongly_convex_decreasing:
      p.kappa = theorem_kappa(in.smoothness, in.mu, in.tau_eff, in.m);
      p.stepsize = StepsizeSchedule::inverse_time(in.mu, p.kappa, p.cap);
      p.weights = WeightSchedule::linear(p.kappa);
      break;
    case Regime::strongly_convex_constant: {
      if (!(in.mu > 0.0)) {
        throw Error(ErrorCode::requires_strong_convexity, "strongly convex preset needs mu > 0");
      }
      const double a = in.mu / 2.0;
      const double gamma = tune_strongly_convex_stepsize(in.dist0_sq, 2.0 * noise, a,
                                                         std::max(d_cap, a), in.horizon);
      p.stepsize = StepsizeSchedule::constant(gamma, p.cap);
      p.weights = WeightSchedule::exponential(1.0 - a * gamma);
      break;
    }
    case Regime::weakly_convex: {
      const double gamma = tune_constant_stepsize(in.dist0_sq, 2.0 * noise, d_cap, in.horizon);
      // r0 = 0 starts at the optimum; any admissible stepsize will do.
      p.stepsize = StepsizeSchedule::constant(gamma > 0.0 ? gamma : p.cap, p.cap);
      p.weights = WeightSchedule::uniform();
      break;
    }
    case Regime::nonconvex: {
      const double gamma = tune_constant_stepsize(5.0 * in.subopt0, 4.0 * in.smoothness * noise,
                                                  d_cap, in.horizon);
      // r0 = 0 starts at the optimum; any admissible stepsize will do.
      p.stepsize = StepsizeSchedule::constant(gamma > 0.0 ? gamma : p.cap, p.cap);
      p.weights = WeightSchedule::uniform();
      break;
    }
  }
  return p;
}

}  // namespace efsim
