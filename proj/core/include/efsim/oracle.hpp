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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "efsim/least_squares.hpp"
#include "efsim/objective.hpp"
#include "efsim/rng.hpp"
#include "efsim/vec.hpp"

namespace efsim {

enum class NoiseKind {
  none,
  additive,            // g = grad f + xi, xi Gaussian with E||xi||^2 = sigma^2
  finite_sum,          // g = grad f_i, i uniform on [n]
  strong_growth,       // g = (1 + eta) grad f, eta uniform with E eta^2 = M
};

std::string_view to_string(NoiseKind kind);

// Which noise bound the declared (M, sigma^2) certify:
//   general: E||xi||^2 <= M ||grad f(x)||^2 + sigma^2
//   weak:    E||xi||^2 <= 2 L M (f(x) - f*) + sigma^2
enum class NoiseAssumption { general, weak };

// Stochastic gradient oracle with declared (M, sigma^2). Immutable; all
// randomness comes from the caller's RngStream.
class GradientOracle {
 public:
  static GradientOracle deterministic(std::shared_ptr<const Objective> objective);
  static GradientOracle additive(std::shared_ptr<const Objective> objective, double sigma2);
  // Declares M = 6 and sigma^2 = 3 (1/n) sum_i ||grad f_i(x*)||^2 under the
  // weak assumption, with L taken as the common component smoothness.
  static GradientOracle finite_sum(std::shared_ptr<const FiniteSumObjective> objective);
  static GradientOracle strong_growth(std::shared_ptr<const Objective> objective, double m);

  // g = grad f(x) + xi.
  void sample(const Vec& x, RngStream& rng, Vec& out) const;
  Vec sample(const Vec& x, RngStream& rng) const;

  // Also writes the exact gradient grad f(x) into exact_gradient.
  void sample(const Vec& x, RngStream& rng, Vec& out, Vec& exact_gradient) const;

  const Objective& objective() const noexcept { return *objective_; }
  const std::shared_ptr<const Objective>& objective_ptr() const noexcept { return objective_; }
  NoiseKind kind() const noexcept { return kind_; }
  NoiseAssumption assumption() const noexcept { return assumption_; }
  double declared_m() const noexcept { return m_; }
  double declared_sigma2() const noexcept { return sigma2_; }
  // Smoothness constant used by the weak bound 2 L M (f - f*) + sigma^2.
  double noise_smoothness() const noexcept { return noise_smoothness_; }

  // E||xi||^2 at x by enumeration when the noise law is finite
  // (none, finite-sum); negative when only Monte Carlo is available.
  double exact_noise_second_moment(const Vec& x) const;

 private:
  GradientOracle() = default;

  std::shared_ptr<const Objective> objective_;
  std::shared_ptr<const FiniteSumObjective> finite_sum_;
  NoiseKind kind_ = NoiseKind::none;
  NoiseAssumption assumption_ = NoiseAssumption::general;
  double m_ = 0.0;
  double sigma2_ = 0.0;
  double sigma_ = 0.0;
  double growth_halfwidth_ = 0.0;
  double noise_smoothness_ = 0.0;
};

struct NoiseAuditPoint {
  double second_moment = 0.0;   // estimate of E||xi||^2
  double std_error = 0.0;       // 0 when computed by enumeration
  double bound_general = 0.0;   // M ||grad f||^2 + sigma^2
  double bound_weak = 0.0;      // 2 L M (f - f*) + sigma^2
  double slack_general = 0.0;   // bound_general - second_moment
  double slack_weak = 0.0;
  bool exact = false;
  bool flagged = false;         // declared bound exceeded beyond 3 standard errors
};

struct NoiseAuditReport {
  std::vector<NoiseAuditPoint> points;
  std::size_t trials = 0;
  bool passed() const noexcept;
};

// Checks the declared noise bound at each point. Finite laws are enumerated
// exactly; otherwise E||xi||^2 is estimated from `trials` samples.
NoiseAuditReport audit_noise(const GradientOracle& oracle, const std::vector<Vec>& points,
                             std::size_t trials, RngStream& rng);

}  // namespace efsim
