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
#include "efsim/rng.hpp"

#include <cmath>
#include <limits>

#include "efsim/error.hpp"

namespace efsim {

std::uint64_t make_stream_id(std::uint32_t worker, StreamPurpose purpose) noexcept {
  return (static_cast<std::uint64_t>(worker) << 32) | static_cast<std::uint32_t>(purpose);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_id),
      static_cast<std::uint32_t>(stream_id >> 32),
  };
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw_invalid("uniform_index needs n >= 1");
  const std::uint64_t bound = n;
  // Rejection sampling removes the modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

double RngStream::normal() {
  if (spare_normal_) {
    const double value = *spare_normal_;
    spare_normal_.reset();
    return value;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  return u * factor;
}

Vec gaussian_vector(RngStream& rng, std::size_t dim, double sigma) {
  Vec out(dim);
  add_gaussian_noise(rng, sigma, out);
  return out;
}

void add_gaussian_noise(RngStream& rng, double sigma, Vec& out) {
  if (!(sigma >= 0.0)) throw_invalid("noise level sigma must be non-negative");
  if (sigma == 0.0) return;
  const double coord_sigma = sigma / std::sqrt(static_cast<double>(out.size()));
  for (double& v : out) v += coord_sigma * rng.normal();
}

}  // namespace efsim
