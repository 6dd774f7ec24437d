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
#include <cstdint>
#include <optional>
#include <random>

#include "efsim/vec.hpp"

namespace efsim {

// What a stream is used for. Part of the stream id so that e.g. the oracle
// noise of worker 3 never shares draws with the compressor of worker 3.
enum class StreamPurpose : std::uint32_t {
  oracle = 1,
  compressor = 2,
  delay = 3,
  data = 4,
  probe = 5,
  audit = 6,
};

std::uint64_t make_stream_id(std::uint32_t worker, StreamPurpose purpose) noexcept;

// Reproducible random stream keyed by (seed, stream id).
//
// The engine is std::mt19937_64 seeded through std::seed_seq; both are fully
// specified by the standard. Distributions are implemented here rather than
// with <random> distributions, whose output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);
  RngStream(std::uint64_t seed, std::uint32_t worker, StreamPurpose purpose)
      : RngStream(seed, make_stream_id(worker, purpose)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform on {0, ..., n - 1}; n >= 1.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

// i.i.d. zero-mean Gaussian vector with E||xi||^2 = sigma^2, i.e. per-coordinate
// variance sigma^2 / d.
Vec gaussian_vector(RngStream& rng, std::size_t dim, double sigma);

// out += gaussian_vector(rng, out.size(), sigma) without allocating.
void add_gaussian_noise(RngStream& rng, double sigma, Vec& out);

}  // namespace efsim
