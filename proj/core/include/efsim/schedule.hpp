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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efsim/vec.hpp"

namespace efsim {

enum class StepsizeKind { constant, inverse_time };

// gamma_t, positive and non-increasing. `cap` is the theorem-specific upper
// bound (e.g. 1/(10 L (tau + M))); infinity when unchecked.
class StepsizeSchedule {
 public:
  static StepsizeSchedule constant(double gamma,
                                   double cap = std::numeric_limits<double>::infinity());
  // gamma_t = 4 / (mu (kappa + t)).
  static StepsizeSchedule inverse_time(double mu, double kappa,
                                       double cap = std::numeric_limits<double>::infinity());

  double at(std::size_t t) const noexcept;
  std::vector<double> values(std::size_t count) const;

  StepsizeKind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  double numerator() const noexcept { return numerator_; }
  double kappa() const noexcept { return kappa_; }
  double cap() const noexcept { return cap_; }
  bool within_cap() const noexcept;
  StepsizeSchedule with_cap(double cap) const;
  std::string describe() const;

 private:
  StepsizeSchedule() = default;

  StepsizeKind kind_ = StepsizeKind::constant;
  double gamma_ = 0.0;
  double numerator_ = 0.0;  // 4 / mu
  double kappa_ = 0.0;
  double cap_ = std::numeric_limits<double>::infinity();
};

enum class WeightKind { uniform, linear, exponential };

// w_t > 0. Only ratios w_{t-1}/w_t are needed for averaging, so exponential
// weights never overflow.
class WeightSchedule {
 public:
  static WeightSchedule uniform();
  // w_t = kappa + t, kappa > 0.
  static WeightSchedule linear(double kappa);
  // w_t = rho^{-(t+1)}, rho in (0, 1].
  static WeightSchedule exponential(double rho);

  // May overflow for exponential weights at large t.
  double at(std::size_t t) const;
  // w_{t-1} / w_t for t >= 1.
  double ratio(std::size_t t) const noexcept;
  std::vector<double> values(std::size_t count) const;

  WeightKind kind() const noexcept { return kind_; }
  double kappa() const noexcept { return kappa_; }
  double rho() const noexcept { return rho_; }
  std::string describe() const;

 private:
  WeightSchedule() = default;

  WeightKind kind_ = WeightKind::uniform;
  double kappa_ = 0.0;
  double rho_ = 1.0;
};

// Streaming sum_t w_t x_t / W_t via the normalized recurrence
//   avg_t = avg_{t-1} + (x_t - avg_{t-1}) / (1 + W_{t-1}/w_t).
class WeightedAverager {
 public:
  explicit WeightedAverager(WeightSchedule weights) : weights_(weights) {}

  void push(const Vec& x);
  void push(double value);
  std::size_t count() const noexcept { return count_; }
  const Vec& vector_average() const;
  double scalar_average() const noexcept { return scalar_; }

 private:
  double next_fraction();

  WeightSchedule weights_;
  std::size_t count_ = 0;
  double ratio_acc_ = 0.0;  // W_{t-1} / w_t
  std::optional<Vec> avg_;
  double scalar_ = 0.0;
};

Vec weighted_average(std::span<const Vec> points, const WeightSchedule& weights);

// a_{t+1} <= a_t and a_{t+1} (1 + 1/(2 tau)) >= a_t for all consecutive
// pairs. Requires at least two entries, all positive.
bool is_tau_slow_decreasing(std::span<const double> seq, double tau);
// {1/a_t} is tau-slow decreasing.
bool is_tau_slow_increasing(std::span<const double> seq, double tau);

// 40 L (tau_eff + M) / mu. Throws requires_strong_convexity for mu <= 0 and
// invalid_parameter for tau_eff < 1.
double theorem_kappa(double smoothness, double mu, double tau_eff, double m);

// 1 / (10 L (tau_eff + M)).
double theorem_stepsize_cap(double smoothness, double tau_eff, double m);

// min(1/d_cap, sqrt(r0 / (c (T + 1)))); 1/d_cap when c = 0.
double tune_constant_stepsize(double r0, double c, double d_cap, std::size_t horizon);

// Constant stepsize for the strongly quasi-convex case with contraction a:
//   min(1/d_cap, ln(max(e, a^2 r0 T^2 / c)) / (a T));
// 1/d_cap when c = 0 or T = 0. Reconstructed from the standard tuning
// argument for Psi_T <= (r0/gamma) exp(-a gamma T) + c gamma.
double tune_strongly_convex_stepsize(double r0, double c, double a, double d_cap,
                                     std::size_t horizon);

enum class Regime { strongly_convex_decreasing, strongly_convex_constant, weakly_convex, nonconvex };

std::string_view to_string(Regime regime);

struct PresetInputs {
  double smoothness = 0.0;
  double mu = 0.0;
  double m = 0.0;
  double sigma2 = 0.0;
  double tau_eff = 1.0;
  double workers = 1.0;        // K for local SGD; divides the noise term
  double dist0_sq = 0.0;       // ||x0 - x*||^2
  double subopt0 = 0.0;        // f(x0) - f*
  std::size_t horizon = 0;     // T
};

struct SchedulePreset {
  Regime regime = Regime::weakly_convex;
  StepsizeSchedule stepsize = StepsizeSchedule::constant(1.0);
  WeightSchedule weights = WeightSchedule::uniform();
  double tau_eff = 1.0;
  double kappa = 0.0;  // 0 unless inverse-time
  double cap = 0.0;
};

SchedulePreset make_schedule_preset(Regime regime, const PresetInputs& in);

// Parses "strongly-convex-decreasing" etc.
Regime parse_regime(std::string_view name);

}  // namespace efsim
