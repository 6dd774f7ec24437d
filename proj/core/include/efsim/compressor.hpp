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
#include <string>
#include <string_view>
#include <vector>

#include "efsim/rng.hpp"
#include "efsim/vec.hpp"

namespace efsim {

enum class CompressorKind { identity, rand_drop, rand_coordinate, top_k };

std::string_view to_string(CompressorKind kind);

// delta-approximate compressor: E||x - C(x)||^2 <= (1 - delta) ||x||^2.
// Outputs are never rescaled.
class Compressor {
 public:
  static Compressor identity();
  // Returns x with probability 1/tau and 0 otherwise; delta = 1/tau.
  static Compressor rand_drop(double tau);
  // Keeps each coordinate independently with probability delta.
  static Compressor rand_coordinate(double delta);
  // Keeps the k largest-magnitude coordinates (lowest index wins ties);
  // delta = k/d.
  static Compressor top_k(std::size_t k, std::size_t dim);

  CompressorKind kind() const noexcept { return kind_; }
  double delta() const noexcept { return delta_; }
  double tau() const noexcept { return tau_; }
  std::size_t k() const noexcept { return k_; }
  // Dimension top-k was built for; 0 for the dimension-free kinds.
  std::size_t dim() const noexcept { return dim_; }
  bool is_random() const noexcept {
    return kind_ == CompressorKind::rand_drop || kind_ == CompressorKind::rand_coordinate;
  }
  std::string describe() const;

  void compress(const Vec& x, RngStream& rng, Vec& out) const;
  Vec compress(const Vec& x, RngStream& rng) const;

  // E||x - C(x)||^2 in closed form (every shipped kind has one).
  double expected_residual(const Vec& x) const;

 private:
  Compressor() = default;

  CompressorKind kind_ = CompressorKind::identity;
  double delta_ = 1.0;
  double tau_ = 1.0;
  std::size_t k_ = 0;
  std::size_t dim_ = 0;
};

// Probe set used by the contract checks: canonical basis vectors, all-ones,
// `gaussian_probes` Gaussian vectors and single-spike vectors on top of a
// small uniform background.
std::vector<Vec> compressor_probes(std::size_t dim, RngStream& rng,
                                   std::size_t gaussian_probes = 4);

struct ContractCheck {
  double ratio = 0.0;        // MC estimate of E||x - C(x)||^2 / ||x||^2
  double std_error = 0.0;    // of the ratio
  double exact_ratio = 0.0;  // closed form
  double bound = 0.0;        // 1 - delta
  bool passed = false;       // ratio <= bound + 3 std_error
};

ContractCheck check_contract(const Compressor& c, const Vec& x, std::size_t trials,
                             RngStream& rng);

// 1 - max over probes of the MC estimate of E||x - C(x)||^2 / ||x||^2.
double estimate_delta(const Compressor& c, std::size_t dim, std::size_t trials, RngStream& rng);

}  // namespace efsim
