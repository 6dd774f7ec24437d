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
#include <vector>

#include "efsim/objective.hpp"
#include "efsim/rng.hpp"

namespace efsim {

// f(x) = (1/n) sum_i f_i(x). Components are convex and each is
// component_smoothness()-smooth.
class FiniteSumObjective : public Objective {
 public:
  virtual std::size_t num_components() const = 0;
  virtual double component_value(std::size_t i, const Vec& x) const = 0;
  virtual void component_gradient(std::size_t i, const Vec& x, Vec& out) const = 0;
  // Common smoothness constant of the components (max over i).
  virtual double component_smoothness() const = 0;

  // (1/n) sum_i ||grad f_i(x*)||^2, computed by enumeration.
  double gradient_variance_at_optimum() const;

 protected:
  using Objective::Objective;
};

// f_i(x) = 1/2 (b_i - <x, a_i>)^2 with Gaussian rows a_i ~ N(0, I_d) and
// b_i = <x_true, a_i> + noise_level * N(0, 1). x* and f* come from the
// normal equations; L and mu are the extreme eigenvalues of (1/n) A^T A.
class LeastSquares final : public FiniteSumObjective {
 public:
  LeastSquares(std::vector<double> design, std::vector<double> targets, std::size_t dim,
               Vec x_true);

  std::string name() const override { return "least-squares"; }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& out) const override;
  using Objective::gradient;

  std::size_t num_components() const override { return targets_.size(); }
  double component_value(std::size_t i, const Vec& x) const override;
  void component_gradient(std::size_t i, const Vec& x, Vec& out) const override;
  double component_smoothness() const override { return component_smoothness_; }

  const Vec& x_true() const noexcept { return x_true_; }

 private:
  double residual(std::size_t i, const Vec& x) const;

  std::vector<double> design_;  // n x d, row-major
  std::vector<double> targets_;
  Vec x_true_;
  double component_smoothness_ = 0.0;
};

// Throws ErrorCode::degenerate_design when lambda_min((1/n) A^T A) <= 1e-10.
std::shared_ptr<const LeastSquares> make_least_squares(std::size_t n, std::size_t dim,
                                                       RngStream& rng, double noise_level);

}  // namespace efsim
