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
#include <string>
#include <string_view>
#include <vector>

#include "efsim/engine.hpp"
#include "efsim/vec.hpp"

namespace efsim {

// Expectation inequalities checked across seeds. Each is written LHS <= RHS
// with every expectation replaced by its per-seed realization, so the
// per-seed slack RHS - LHS is an unbiased estimate of E[RHS] - E[LHS].
enum class LemmaKind {
  // 3L ||e_t||^2 <= 1/(16 L tau) sum_{i=1..tau} ||grad f(x_{t-i})||^2 + gamma_t sigma^2
  dsgd_error,
  // 3L ||e_{t+1}||^2 <= delta/(64 L) sum_{i<=t} (1 - delta/4)^{t-i} ||grad f(x_i)||^2
  //                     + gamma_t sigma^2
  ecsgd_error,
  // (1/K) sum_k 3L ||x_t^k - x~_t||^2
  //   <= 1/(16 L tau K) sum_k sum_{i=0..tau-1} ||grad f(x_{t-i}^k)||^2 + gamma_t sigma^2 / K
  local_dispersion,
  // ||x~_{t+1} - x*||^2 <= (1 - mu gamma/2) ||x~_t - x*||^2 - gamma/2 (f(x_t) - f*)
  //                        + gamma^2 sigma^2 + 3 L gamma ||x_t - x~_t||^2
  // (worker-averaged form for local SGD)
  descent_strong,
  // f(x~_{t+1}) <= f(x~_t) - gamma/4 ||grad f(x_t)||^2 + gamma^2 L sigma^2 / 2
  //               + gamma L^2 / 2 ||x_t - x~_t||^2
  // (worker-averaged form for local SGD)
  descent_nonconvex,
};

std::string_view to_string(LemmaKind lemma);

struct AuditPoint {
  std::size_t t = 0;
  double lhs = 0.0;        // mean over seeds
  double rhs = 0.0;        // mean over seeds
  double slack = 0.0;      // mean of per-seed rhs - lhs
  double std_error = 0.0;  // of the slack
  bool passed = true;      // slack >= -3 std_error
};

struct LemmaAuditReport {
  LemmaKind lemma = LemmaKind::dsgd_error;
  std::string algorithm;
  std::size_t seeds = 0;
  std::size_t horizon = 0;
  std::vector<AuditPoint> points;
  std::size_t failures = 0;
  bool passed() const noexcept { return failures == 0; }
};

// Throws configuration_rejected when the lemma's stepsize conditions do not
// hold for the engine's schedule on [0, horizon], or the engine is the wrong
// algorithm kind for the lemma.
void check_lemma_preconditions(LemmaKind lemma, const Engine& engine, std::size_t horizon);

LemmaAuditReport audit_lemma(LemmaKind lemma, const Engine& engine, const Vec& x0,
                             std::size_t seeds, std::size_t horizon,
                             std::uint64_t base_seed = 1);

}  // namespace efsim
