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
#include "efsim/least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "efsim/error.hpp"

namespace efsim {

double FiniteSumObjective::gradient_variance_at_optimum() const {
  const Vec center = reference_point();
  Vec grad(dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < num_components(); ++i) {
    component_gradient(i, center, grad);
    acc += norm_sq(grad);
  }
  return acc / static_cast<double>(num_components());
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kDegenerateEigenvalue = 1e-10;

ObjectiveConstants least_squares_constants(const std::vector<double>& design,
                                           const std::vector<double>& targets, std::size_t dim) {
  const std::size_t n = targets.size();
  if (dim == 0) throw_invalid("least squares requires d >= 1");
  if (n < dim) throw Error(ErrorCode::degenerate_design, "design with n < d is singular");
  if (design.size() != n * dim) throw_invalid("design matrix has the wrong size");

  const Eigen::Map<const RowMatrix> a(design.data(), static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(dim));
  const Eigen::Map<const Eigen::VectorXd> b(targets.data(), static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd gram = (a.transpose() * a) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (lambda_min <= kDegenerateEigenvalue) {
    throw Error(ErrorCode::degenerate_design,
                "design is singular (lambda_min = " + std::to_string(lambda_min) + ")");
  }
  const Eigen::VectorXd rhs = (a.transpose() * b) / static_cast<double>(n);
  const Eigen::VectorXd solution = gram.ldlt().solve(rhs);
  const Eigen::VectorXd resid = b - a * solution;

  ObjectiveConstants c;
  c.dim = dim;
  c.f_star = 0.5 * resid.squaredNorm() / static_cast<double>(n);
  c.x_star = Vec(std::vector<double>(solution.data(), solution.data() + dim));
  c.smoothness = lambda_max;
  c.mu = lambda_min;
  c.convexity = ConvexityClass::strongly_quasi_convex;
  return c;
}

}  // namespace

LeastSquares::LeastSquares(std::vector<double> design, std::vector<double> targets,
                           std::size_t dim, Vec x_true)
    : FiniteSumObjective(least_squares_constants(design, targets, dim)),
      design_(std::move(design)),
      targets_(std::move(targets)),
      x_true_(std::move(x_true)) {
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    double row_sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) row_sq += design_[i * dim + j] * design_[i * dim + j];
    component_smoothness_ = std::max(component_smoothness_, row_sq);
  }
}

double LeastSquares::residual(std::size_t i, const Vec& x) const {
  const std::size_t d = dim();
  const double* row = design_.data() + i * d;
  double pred = 0.0;
  for (std::size_t j = 0; j < d; ++j) pred += row[j] * x[j];
  return targets_[i] - pred;
}

double LeastSquares::component_value(std::size_t i, const Vec& x) const {
  const double r = residual(i, x);
  return 0.5 * r * r;
}

void LeastSquares::component_gradient(std::size_t i, const Vec& x, Vec& out) const {
  const std::size_t d = dim();
  const double r = residual(i, x);
  const double* row = design_.data() + i * d;
  for (std::size_t j = 0; j < d; ++j) out[j] = -r * row[j];
}

double LeastSquares::value(const Vec& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < num_components(); ++i) acc += component_value(i, x);
  return acc / static_cast<double>(num_components());
}

void LeastSquares::gradient(const Vec& x, Vec& out) const {
  const std::size_t n = num_components();
  const std::size_t d = dim();
  const Eigen::Map<const RowMatrix> a(design_.data(), static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(d));
  const Eigen::Map<const Eigen::VectorXd> b(targets_.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(d));
  Eigen::Map<Eigen::VectorXd> g(out.data(), static_cast<Eigen::Index>(d));
  g = (a.transpose() * (a * xv - b)) / static_cast<double>(n);
}

std::shared_ptr<const LeastSquares> make_least_squares(std::size_t n, std::size_t dim,
                                                       RngStream& rng, double noise_level) {
  if (dim == 0) throw_invalid("least squares requires d >= 1");
  if (n < dim) throw Error(ErrorCode::degenerate_design, "design with n < d is singular");
  if (!(noise_level >= 0.0)) throw_invalid("noise_level must be non-negative");
  Vec x_true(dim);
  for (double& v : x_true) v = rng.normal();
  std::vector<double> design(n * dim);
  for (double& v : design) v = rng.normal();
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) acc += design[i * dim + j] * x_true[j];
    targets[i] = acc + noise_level * rng.normal();
  }
  return std::make_shared<const LeastSquares>(std::move(design), std::move(targets), dim,
                                              std::move(x_true));
}

}  // namespace efsim
