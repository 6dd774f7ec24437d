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
#include "efsim/objective.hpp"

#include <cmath>

#include "efsim/error.hpp"

namespace efsim {

std::string_view to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::strongly_quasi_convex:
      return "strongly-quasi-convex";
    case ConvexityClass::weakly_quasi_convex:
      return "weakly-quasi-convex";
    case ConvexityClass::non_convex:
      return "non-convex";
  }
  return "unknown";
}

Objective::Objective(ObjectiveConstants constants) : constants_(std::move(constants)) {
  if (constants_.dim == 0) throw_invalid("objective dimension must be at least 1");
  if (constants_.mu < 0.0) throw_invalid("mu must be non-negative");
  if (constants_.smoothness < constants_.mu) throw_invalid("L must be at least mu");
  if (constants_.x_star && constants_.x_star->size() != constants_.dim) {
    throw_invalid("x_star dimension does not match objective dimension");
  }
}

Vec Objective::gradient(const Vec& x) const {
  Vec out(dim());
  gradient(x, out);
  return out;
}

Vec Objective::reference_point() const { return x_star() ? *x_star() : Vec::zeros(dim()); }

// ---------------------------------------------------------------------------
// Quadratic

namespace {

ObjectiveConstants quadratic_constants(std::size_t dim, double mu, double smoothness,
                                       const Vec& x_star) {
  if (dim == 0) throw_invalid("quadratic dimension must be at least 1");
  if (!(mu > 0.0)) throw_invalid("quadratic requires mu > 0");
  if (mu > smoothness) throw_invalid("quadratic requires mu <= L");
  if (x_star.size() != dim) throw_invalid("x_star dimension does not match");
  ObjectiveConstants c;
  c.dim = dim;
  c.f_star = 0.0;
  c.x_star = x_star;
  c.smoothness = smoothness;
  c.mu = mu;
  c.convexity = ConvexityClass::strongly_quasi_convex;
  return c;
}

}  // namespace

Quadratic::Quadratic(std::size_t dim, double mu, double smoothness, Vec x_star)
    : Objective(quadratic_constants(dim, mu, smoothness, x_star)),
      eigenvalues_(dim),
      inv_sqrt_dim_(1.0 / std::sqrt(static_cast<double>(dim))) {
  if (dim == 1) {
    eigenvalues_[0] = smoothness;
    return;
  }
  const double log_ratio = std::log(smoothness / mu);
  for (std::size_t i = 0; i < dim; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(dim - 1);
    eigenvalues_[i] = mu * std::exp(frac * log_ratio);
  }
  eigenvalues_.front() = mu;
  eigenvalues_.back() = smoothness;
}

void Quadratic::rotate(const Vec& x, std::vector<double>& y) const {
  const Vec& center = *x_star();
  const std::size_t d = dim();
  y.resize(d);
  double proj = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    y[i] = x[i] - center[i];
    proj += y[i];
  }
  const double scale = 2.0 * proj * inv_sqrt_dim_ * inv_sqrt_dim_;
  for (std::size_t i = 0; i < d; ++i) y[i] -= scale;
}

double Quadratic::value(const Vec& x) const {
  thread_local std::vector<double> y;
  rotate(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += eigenvalues_[i] * y[i] * y[i];
  return 0.5 * acc;
}

void Quadratic::gradient(const Vec& x, Vec& out) const {
  thread_local std::vector<double> y;
  rotate(x, y);
  const std::size_t d = dim();
  double proj = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = eigenvalues_[i] * y[i];
    proj += out[i];
  }
  const double scale = 2.0 * proj * inv_sqrt_dim_ * inv_sqrt_dim_;
  for (std::size_t i = 0; i < d; ++i) out[i] -= scale;
}

std::vector<double> Quadratic::dense_matrix() const {
  const std::size_t d = dim();
  const double v = inv_sqrt_dim_;
  std::vector<double> h(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) h[i * d + j] = (i == j ? 1.0 : 0.0) - 2.0 * v * v;
  }
  std::vector<double> a(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += h[i * d + k] * eigenvalues_[k] * h[k * d + j];
      a[i * d + j] = acc;
    }
  }
  return a;
}

std::shared_ptr<const Quadratic> make_quadratic(std::size_t dim, double mu, double smoothness,
                                                Vec x_star) {
  return std::make_shared<const Quadratic>(dim, mu, smoothness, std::move(x_star));
}

std::shared_ptr<const Quadratic> make_quadratic(std::size_t dim, double mu, double smoothness) {
  if (dim == 0) throw_invalid("quadratic dimension must be at least 1");
  return make_quadratic(dim, mu, smoothness, Vec::zeros(dim));
}

// ---------------------------------------------------------------------------
// Star-convex 1-d

namespace {

ObjectiveConstants star_convex_constants() {
  ObjectiveConstants c;
  c.dim = 1;
  c.f_star = 0.0;
  c.x_star = Vec::zeros(1);
  c.smoothness = 2.0;
  c.mu = 0.0;
  c.convexity = ConvexityClass::weakly_quasi_convex;
  return c;
}

// r (1 - e^{-r}) and its derivative 1 - e^{-r} + r e^{-r}, r >= 0.
double radial_h(double r) { return -r * std::expm1(-r); }
double radial_h_prime(double r) { return -std::expm1(-r) + r * std::exp(-r); }

}  // namespace

StarConvex1d::StarConvex1d() : Objective(star_convex_constants()) {}

double StarConvex1d::value(const Vec& x) const { return radial_h(std::abs(x[0])); }

void StarConvex1d::gradient(const Vec& x, Vec& out) const {
  const double r = std::abs(x[0]);
  // Subgradient 0 at the kink-free minimizer.
  if (r == 0.0) {
    out[0] = 0.0;
    return;
  }
  out[0] = std::copysign(radial_h_prime(r), x[0]);
}

std::shared_ptr<const StarConvex1d> make_star_convex_1d() {
  return std::make_shared<const StarConvex1d>();
}

// ---------------------------------------------------------------------------
// Radial non-convex

namespace {

ObjectiveConstants radial_constants(std::size_t dim, double mu) {
  if (dim < 2) throw_invalid("radial objective requires dim >= 2");
  if (!(mu >= 0.0)) throw_invalid("radial objective requires mu >= 0");
  ObjectiveConstants c;
  c.dim = dim;
  c.f_star = 0.0;
  c.x_star = Vec::zeros(dim);
  c.smoothness = RadialNonconvex::kSmoothnessBase + mu;
  c.mu = mu;
  c.convexity = mu > 0.0 ? ConvexityClass::strongly_quasi_convex
                         : ConvexityClass::weakly_quasi_convex;
  return c;
}

double sphere_g(double u1, double u2) { return 1.0 + 0.5 * std::sin(2.0 * u1) * std::cos(3.0 * u2); }

}  // namespace

RadialNonconvex::RadialNonconvex(std::size_t dim, double mu)
    : Objective(radial_constants(dim, mu)), mu_(mu) {}

double RadialNonconvex::value(const Vec& x) const {
  const double r = norm(x);
  if (r == 0.0) return 0.0;
  return radial_h(r) * sphere_g(x[0] / r, x[1] / r) + 0.5 * mu_ * r * r;
}

void RadialNonconvex::gradient(const Vec& x, Vec& out) const {
  const double r = norm(x);
  const std::size_t d = dim();
  if (r == 0.0) {
    out.fill(0.0);
    return;
  }
  const double u1 = x[0] / r;
  const double u2 = x[1] / r;
  const double g = sphere_g(u1, u2);
  // Ambient gradient of g at u; only the first two coordinates are non-zero.
  const double dg1 = std::cos(2.0 * u1) * std::cos(3.0 * u2);
  const double dg2 = -1.5 * std::sin(2.0 * u1) * std::sin(3.0 * u2);
  const double radial_dg = dg1 * u1 + dg2 * u2;
  const double h_over_r = -std::expm1(-r);
  const double radial = radial_h_prime(r) * g - h_over_r * radial_dg;
  for (std::size_t i = 0; i < d; ++i) out[i] = radial * (x[i] / r) + mu_ * x[i];
  // Tangential part (h / r) P grad g; the -(u . grad g) u term is folded above.
  out[0] += h_over_r * dg1;
  out[1] += h_over_r * dg2;
}

std::shared_ptr<const RadialNonconvex> make_nonconvex_radial(std::size_t dim, double mu) {
  return std::make_shared<const RadialNonconvex>(dim, mu);
}

}  // namespace efsim
