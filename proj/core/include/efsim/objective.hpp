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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "efsim/vec.hpp"

namespace efsim {

enum class ConvexityClass {
  strongly_quasi_convex,
  weakly_quasi_convex,
  non_convex,
};

std::string_view to_string(ConvexityClass c);

// Certified constants carried by every objective.
struct ObjectiveConstants {
  std::size_t dim = 1;
  double f_star = 0.0;
  std::optional<Vec> x_star;
  double smoothness = 0.0;  // L
  double mu = 0.0;          // quasi-convexity constant w.r.t. x_star
  ConvexityClass convexity = ConvexityClass::non_convex;
};

// Differentiable test function with known minimum value and certified L, mu.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual double value(const Vec& x) const = 0;
  // Writes grad f(x) into out; out.size() must equal dim().
  virtual void gradient(const Vec& x, Vec& out) const = 0;

  Vec gradient(const Vec& x) const;
  double suboptimality(const Vec& x) const { return value(x) - constants_.f_star; }

  std::size_t dim() const noexcept { return constants_.dim; }
  double f_star() const noexcept { return constants_.f_star; }
  const std::optional<Vec>& x_star() const noexcept { return constants_.x_star; }
  // x_star when known, the origin otherwise.
  Vec reference_point() const;
  double smoothness() const noexcept { return constants_.smoothness; }
  double mu() const noexcept { return constants_.mu; }
  ConvexityClass convexity() const noexcept { return constants_.convexity; }
  const ObjectiveConstants& constants() const noexcept { return constants_; }

 protected:
  explicit Objective(ObjectiveConstants constants);

 private:
  ObjectiveConstants constants_;
};

// f(x) = 1/2 (x - x*)^T A (x - x*) with A = H diag(lambda) H, where H is the
// Householder reflection across the all-ones direction and lambda is
// log-spaced on [mu, L]. Gradients cost O(d).
class Quadratic final : public Objective {
 public:
  Quadratic(std::size_t dim, double mu, double smoothness, Vec x_star);

  std::string name() const override { return "quadratic"; }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& out) const override;
  using Objective::gradient;

  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  // Dense A, row-major, for tests and diagnostics.
  std::vector<double> dense_matrix() const;

 private:
  // y = H (x - x*)
  void rotate(const Vec& x, std::vector<double>& y) const;

  std::vector<double> eigenvalues_;
  double inv_sqrt_dim_;
};

// f(x) = |x| (1 - exp(-|x|)) on the real line: smooth, star-convex and not
// convex. x* = 0, f* = 0, mu = 0.
//
// Smoothness: for x > 0, f''(x) = (2 - x) exp(-x), which lies in
// [-exp(-3), 2]; f' is odd and continuous with f'(0) = 0, so f' is
// Lipschitz with constant sup|f''| = 2. The certified L is therefore 2.
class StarConvex1d final : public Objective {
 public:
  StarConvex1d();

  std::string name() const override { return "star-convex-1d"; }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& out) const override;
  using Objective::gradient;
};

// f(x) = h(|x|) g(x/|x|) + (mu/2)|x|^2 with h(r) = r (1 - exp(-r)) and the
// positive trigonometric polynomial g(u) = 1 + sin(2 u_1) cos(3 u_2) / 2
// restricted to the unit sphere; f(0) = 0.
//
// <grad f(x), x> - f(x) = |x|^2 exp(-|x|) g + (mu/2)|x|^2, so f is
// mu-quasi-convex w.r.t. x* = 0 (weakly for mu = 0) but not convex.
//
// Smoothness certificate. With r = |x|, u = x/r, P = I - u u^T and the
// 0-homogeneous extension G(x) = g(x/r):
//   Hess f = h'' G u u^T + h' (u grad G^T + grad G u^T) + (h'/r) G P
//            + h Hess G + mu I,
//   |grad G| <= G1 / r,  |Hess G| <= (G2 + 4 G1) / r^2,
// with G1 = sup|grad g| <= 3/2, G2 = sup|Hess g|_F <= 13/2, sup g = 3/2.
// Using |h''| <= 2, h' <= 2r and h <= r^2:
//   L <= 4 sup g + 8 G1 + G2 + mu = 24.5 + mu.
class RadialNonconvex final : public Objective {
 public:
  RadialNonconvex(std::size_t dim, double mu);

  std::string name() const override { return "nonconvex-radial"; }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& out) const override;
  using Objective::gradient;

  static constexpr double kSmoothnessBase = 24.5;

 private:
  double mu_;
};

std::shared_ptr<const Quadratic> make_quadratic(std::size_t dim, double mu, double smoothness,
                                                Vec x_star);
std::shared_ptr<const Quadratic> make_quadratic(std::size_t dim, double mu, double smoothness);
std::shared_ptr<const StarConvex1d> make_star_convex_1d();
std::shared_ptr<const RadialNonconvex> make_nonconvex_radial(std::size_t dim, double mu);

}  // namespace efsim
