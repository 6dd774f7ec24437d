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
#include "efsim/vec.hpp"

#include <cmath>
#include <algorithm>
#include <string>

#include "efsim/error.hpp"

namespace efsim {

namespace {

void check_dim(std::size_t dim) {
  if (dim == 0) throw_invalid("vector dimension must be at least 1");
}

void check_same(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw_invalid("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                  std::to_string(b.size()));
  }
}

}  // namespace

Vec::Vec(std::size_t dim, double fill) : data_(dim, fill) {
  check_dim(dim);
  if (!std::isfinite(fill)) throw_invalid("vector entries must be finite");
}

Vec::Vec(std::initializer_list<double> values) : Vec(std::vector<double>(values)) {}

Vec::Vec(std::vector<double> values) : data_(std::move(values)) {
  check_dim(data_.size());
  if (!all_finite()) throw_invalid("vector entries must be finite");
}

Vec Vec::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw_invalid("basis index out of range");
  Vec v(dim);
  v[index] = 1.0;
  return v;
}

void Vec::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Vec::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Vec& Vec::operator+=(const Vec& other) {
  check_same(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& other) {
  check_same(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vec& Vec::operator*=(double scale) noexcept {
  for (double& v : data_) v *= scale;
  return *this;
}

Vec& Vec::axpy(double a, const Vec& x) {
  check_same(*this, x);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
  return *this;
}

Vec operator+(Vec lhs, const Vec& rhs) { return lhs += rhs; }
Vec operator-(Vec lhs, const Vec& rhs) { return lhs -= rhs; }
Vec operator*(double scale, Vec v) { return v *= scale; }

double dot(const Vec& a, const Vec& b) {
  check_same(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_sq(const Vec& v) noexcept {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double norm(const Vec& v) noexcept { return std::sqrt(norm_sq(v)); }

double distance_sq(const Vec& a, const Vec& b) {
  check_same(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace efsim
