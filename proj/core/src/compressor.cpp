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
#include "efsim/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "efsim/error.hpp"
#include "efsim/format.hpp"
#include "efsim/running_stats.hpp"

namespace efsim {

std::string_view to_string(CompressorKind kind) {
  switch (kind) {
    case CompressorKind::identity:
      return "identity";
    case CompressorKind::rand_drop:
      return "rand-drop";
    case CompressorKind::rand_coordinate:
      return "rand-coordinate";
    case CompressorKind::top_k:
      return "top-k";
  }
  return "unknown";
}

Compressor Compressor::identity() { return Compressor(); }

Compressor Compressor::rand_drop(double tau) {
  if (!(tau >= 1.0) || !std::isfinite(tau)) throw_invalid("rand-drop needs tau >= 1");
  Compressor c;
  c.kind_ = CompressorKind::rand_drop;
  c.tau_ = tau;
  c.delta_ = 1.0 / tau;
  return c;
}

Compressor Compressor::rand_coordinate(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw_invalid("rand-coordinate needs delta in (0, 1]");
  Compressor c;
  c.kind_ = CompressorKind::rand_coordinate;
  c.delta_ = delta;
  c.tau_ = 1.0 / delta;
  return c;
}

Compressor Compressor::top_k(std::size_t k, std::size_t dim) {
  if (k < 1 || k > dim) throw_invalid("top-k needs 1 <= k <= d");
  Compressor c;
  c.kind_ = CompressorKind::top_k;
  c.k_ = k;
  c.dim_ = dim;
  c.delta_ = static_cast<double>(k) / static_cast<double>(dim);
  c.tau_ = 1.0 / c.delta_;
  return c;
}

std::string Compressor::describe() const {
  switch (kind_) {
    case CompressorKind::identity:
      return "identity";
    case CompressorKind::rand_drop:
      return "rand-drop(tau=" + shortest(tau_) + ")";
    case CompressorKind::rand_coordinate:
      return "rand-coordinate(delta=" + shortest(delta_) + ")";
    case CompressorKind::top_k:
      return "top-k(k=" + std::to_string(k_) + ", d=" + std::to_string(dim_) + ")";
  }
  return "unknown";
}

namespace {

// Indices of the k largest |x_i|, lowest index first among equals.
std::vector<std::size_t> top_indices(const Vec& x, std::size_t k) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&x](std::size_t a, std::size_t b) {
                      const double fa = std::abs(x[a]);
                      const double fb = std::abs(x[b]);
                      return fa > fb || (fa == fb && a < b);
                    });
  idx.resize(k);
  return idx;
}

}  // namespace

void Compressor::compress(const Vec& x, RngStream& rng, Vec& out) const {
  switch (kind_) {
    case CompressorKind::identity:
      std::copy(x.begin(), x.end(), out.begin());
      return;
    case CompressorKind::rand_drop:
      if (tau_ == 1.0 || rng.bernoulli(delta_)) {
        std::copy(x.begin(), x.end(), out.begin());
      } else {
        out.fill(0.0);
      }
      return;
    case CompressorKind::rand_coordinate:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = rng.bernoulli(delta_) ? x[i] : 0.0;
      return;
    case CompressorKind::top_k: {
      if (x.size() != dim_) throw_invalid("top-k dimension mismatch");
      if (k_ == dim_) {
        std::copy(x.begin(), x.end(), out.begin());
        return;
      }
      const auto keep = top_indices(x, k_);
      out.fill(0.0);
      for (std::size_t i : keep) out[i] = x[i];
      return;
    }
  }
}

Vec Compressor::compress(const Vec& x, RngStream& rng) const {
  Vec out(x.size());
  compress(x, rng, out);
  return out;
}

double Compressor::expected_residual(const Vec& x) const {
  switch (kind_) {
    case CompressorKind::identity:
      return 0.0;
    case CompressorKind::rand_drop:
      // Two outcomes: residual 0 w.p. 1/tau, ||x||^2 otherwise.
      return (1.0 - delta_) * norm_sq(x);
    case CompressorKind::rand_coordinate:
      return (1.0 - delta_) * norm_sq(x);
    case CompressorKind::top_k: {
      RngStream unused(0, 0);
      return distance_sq(x, compress(x, unused));
    }
  }
  return 0.0;
}

std::vector<Vec> compressor_probes(std::size_t dim, RngStream& rng, std::size_t gaussian_probes) {
  std::vector<Vec> probes;
  for (std::size_t i = 0; i < dim; ++i) probes.push_back(Vec::basis(dim, i));
  probes.push_back(Vec::ones(dim));
  for (std::size_t j = 0; j < gaussian_probes; ++j) probes.push_back(gaussian_vector(rng, dim, 1.0));
  // Spikes: one dominant coordinate at the first, middle and last position.
  for (std::size_t pos : {std::size_t{0}, dim / 2, dim - 1}) {
    Vec v(dim, 1e-3);
    v[pos] = 1.0;
    probes.push_back(std::move(v));
  }
  return probes;
}

ContractCheck check_contract(const Compressor& c, const Vec& x, std::size_t trials,
                             RngStream& rng) {
  const double x_sq = norm_sq(x);
  if (x_sq == 0.0) throw_invalid("contract check needs a non-zero probe");
  ContractCheck check;
  check.bound = 1.0 - c.delta();
  check.exact_ratio = c.expected_residual(x) / x_sq;
  if (c.is_random()) {
    RunningStats stats;
    Vec out(x.size());
    for (std::size_t i = 0; i < trials; ++i) {
      c.compress(x, rng, out);
      stats.push(distance_sq(x, out) / x_sq);
    }
    check.ratio = stats.mean();
    check.std_error = stats.std_error();
  } else {
    check.ratio = check.exact_ratio;
  }
  // 1e-12 absorbs rounding when the contract is tight.
  check.passed = check.ratio <= check.bound + 3.0 * check.std_error + 1e-12;
  return check;
}

double estimate_delta(const Compressor& c, std::size_t dim, std::size_t trials, RngStream& rng) {
  if (trials < 1000) throw_invalid("estimate_delta needs at least 1000 trials");
  const auto probes = compressor_probes(dim, rng);
  double worst = 0.0;
  for (const Vec& x : probes) worst = std::max(worst, check_contract(c, x, trials, rng).ratio);
  return 1.0 - worst;
}

}  // namespace efsim
