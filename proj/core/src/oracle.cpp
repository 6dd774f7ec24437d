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
#include "efsim/oracle.hpp"

#include <cmath>

#include "efsim/error.hpp"
#include "efsim/running_stats.hpp"

namespace efsim {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::additive:
      return "additive";
    case NoiseKind::finite_sum:
      return "finite-sum";
    case NoiseKind::strong_growth:
      return "strong-growth";
  }
  return "unknown";
}

namespace {

void require_objective(const std::shared_ptr<const Objective>& objective) {
  if (!objective) throw_invalid("oracle needs an objective");
}

}  // namespace

GradientOracle GradientOracle::deterministic(std::shared_ptr<const Objective> objective) {
  require_objective(objective);
  GradientOracle o;
  o.noise_smoothness_ = objective->smoothness();
  o.objective_ = std::move(objective);
  return o;
}

GradientOracle GradientOracle::additive(std::shared_ptr<const Objective> objective,
                                        double sigma2) {
  require_objective(objective);
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw_invalid("sigma^2 must be >= 0");
  GradientOracle o;
  o.kind_ = sigma2 > 0.0 ? NoiseKind::additive : NoiseKind::none;
  o.sigma2_ = sigma2;
  o.sigma_ = std::sqrt(sigma2);
  o.noise_smoothness_ = objective->smoothness();
  o.objective_ = std::move(objective);
  return o;
}

GradientOracle GradientOracle::finite_sum(std::shared_ptr<const FiniteSumObjective> objective) {
  if (!objective) throw_invalid("oracle needs an objective");
  GradientOracle o;
  o.kind_ = NoiseKind::finite_sum;
  o.assumption_ = NoiseAssumption::weak;
  o.m_ = 6.0;
  o.sigma2_ = 3.0 * objective->gradient_variance_at_optimum();
  o.noise_smoothness_ = objective->component_smoothness();
  o.finite_sum_ = objective;
  o.objective_ = std::move(objective);
  return o;
}

GradientOracle GradientOracle::strong_growth(std::shared_ptr<const Objective> objective,
                                             double m) {
  require_objective(objective);
  if (!(m >= 0.0) || !std::isfinite(m)) throw_invalid("M must be >= 0");
  GradientOracle o;
  o.kind_ = m > 0.0 ? NoiseKind::strong_growth : NoiseKind::none;
  o.m_ = m;
  // eta ~ U[-a, a] has E eta^2 = a^2 / 3.
  o.growth_halfwidth_ = std::sqrt(3.0 * m);
  o.noise_smoothness_ = objective->smoothness();
  o.objective_ = std::move(objective);
  return o;
}

void GradientOracle::sample(const Vec& x, RngStream& rng, Vec& out) const {
  switch (kind_) {
    case NoiseKind::none:
      objective_->gradient(x, out);
      return;
    case NoiseKind::additive:
      objective_->gradient(x, out);
      add_gaussian_noise(rng, sigma_, out);
      return;
    case NoiseKind::finite_sum: {
      const std::size_t i = rng.uniform_index(finite_sum_->num_components());
      finite_sum_->component_gradient(i, x, out);
      return;
    }
    case NoiseKind::strong_growth: {
      objective_->gradient(x, out);
      out *= 1.0 + rng.uniform(-growth_halfwidth_, growth_halfwidth_);
      return;
    }
  }
}

void GradientOracle::sample(const Vec& x, RngStream& rng, Vec& out, Vec& exact_gradient) const {
  if (kind_ == NoiseKind::finite_sum) {
    objective_->gradient(x, exact_gradient);
    sample(x, rng, out);
    return;
  }
  objective_->gradient(x, exact_gradient);
  std::copy(exact_gradient.begin(), exact_gradient.end(), out.begin());
  if (kind_ == NoiseKind::additive) {
    add_gaussian_noise(rng, sigma_, out);
  } else if (kind_ == NoiseKind::strong_growth) {
    out *= 1.0 + rng.uniform(-growth_halfwidth_, growth_halfwidth_);
  }
}

Vec GradientOracle::sample(const Vec& x, RngStream& rng) const {
  Vec out(objective_->dim());
  sample(x, rng, out);
  return out;
}

double GradientOracle::exact_noise_second_moment(const Vec& x) const {
  if (kind_ == NoiseKind::none) return 0.0;
  if (kind_ != NoiseKind::finite_sum) return -1.0;
  const Vec full = objective_->gradient(x);
  Vec component(objective_->dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < finite_sum_->num_components(); ++i) {
    finite_sum_->component_gradient(i, x, component);
    acc += distance_sq(component, full);
  }
  return acc / static_cast<double>(finite_sum_->num_components());
}

bool NoiseAuditReport::passed() const noexcept {
  for (const auto& p : points) {
    if (p.flagged) return false;
  }
  return true;
}

NoiseAuditReport audit_noise(const GradientOracle& oracle, const std::vector<Vec>& points,
                             std::size_t trials, RngStream& rng) {
  if (trials < 1000) throw_invalid("audit_noise needs at least 1000 trials");
  const Objective& f = oracle.objective();
  NoiseAuditReport report;
  report.trials = trials;
  Vec sample(f.dim());
  for (const Vec& x : points) {
    NoiseAuditPoint p;
    const Vec grad = f.gradient(x);
    const double grad_sq = norm_sq(grad);
    const double subopt = f.suboptimality(x);
    p.bound_general = oracle.declared_m() * grad_sq + oracle.declared_sigma2();
    p.bound_weak = 2.0 * oracle.noise_smoothness() * oracle.declared_m() * subopt +
                   oracle.declared_sigma2();

    const double exact = oracle.exact_noise_second_moment(x);
    if (exact >= 0.0) {
      p.exact = true;
      p.second_moment = exact;
    } else {
      RunningStats stats;
      for (std::size_t k = 0; k < trials; ++k) {
        oracle.sample(x, rng, sample);
        stats.push(distance_sq(sample, grad));
      }
      p.second_moment = stats.mean();
      p.std_error = stats.std_error();
    }
    p.slack_general = p.bound_general - p.second_moment;
    p.slack_weak = p.bound_weak - p.second_moment;
    const double slack = oracle.assumption() == NoiseAssumption::general ? p.slack_general
                                                                         : p.slack_weak;
    // Relative 1e-12 absorbs rounding when the bound holds with equality.
    const double rounding = 1e-12 * std::max(1.0, std::abs(p.second_moment));
    p.flagged = slack < -3.0 * p.std_error - rounding;
    report.points.push_back(p);
  }
  return report;
}

}  // namespace efsim
