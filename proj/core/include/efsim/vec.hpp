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
#include <initializer_list>
#include <span>
#include <vector>

namespace efsim {

// Dense real vector of fixed dimension d >= 1. Construction rejects
// non-finite entries; arithmetic does not re-check (the engine's divergence
// guard catches NaN/Inf produced mid-run).
class Vec {
 public:
  explicit Vec(std::size_t dim, double fill = 0.0);
  Vec(std::initializer_list<double> values);
  explicit Vec(std::vector<double> values);

  static Vec zeros(std::size_t dim) { return Vec(dim, 0.0); }
  static Vec ones(std::size_t dim) { return Vec(dim, 1.0); }
  static Vec basis(std::size_t dim, std::size_t index);

  std::size_t size() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }

  const double* data() const noexcept { return data_.data(); }
  double* data() noexcept { return data_.data(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<const double> span() const noexcept { return data_; }
  std::span<double> span() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  void fill(double value);
  bool all_finite() const noexcept;

  Vec& operator+=(const Vec& other);
  Vec& operator-=(const Vec& other);
  Vec& operator*=(double scale) noexcept;

  // this += a * x
  Vec& axpy(double a, const Vec& x);

  bool operator==(const Vec& other) const = default;

 private:
  std::vector<double> data_;
};

Vec operator+(Vec lhs, const Vec& rhs);
Vec operator-(Vec lhs, const Vec& rhs);
Vec operator*(double scale, Vec v);

double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& v) noexcept;
double norm(const Vec& v) noexcept;
double distance_sq(const Vec& a, const Vec& b);

}  // namespace efsim
