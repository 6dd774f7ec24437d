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
#include <string>
#include <vector>

#include "json.hpp"

namespace efsim::tools {

enum class AuditSuite { compressor, noise, lemma_dsgd, lemma_ecsgd, lemma_local, descent };

std::string to_string(AuditSuite suite);
// Throws std::invalid_argument for unknown names.
AuditSuite parse_suite(const std::string& name);
std::vector<std::string> suite_names();

// Smallest accepted budget and the budget used when none is given. For the
// lemma suites the budget is the number of seeds.
std::size_t minimum_trials(AuditSuite suite);
std::size_t default_trials(AuditSuite suite);

struct AuditOptions {
  std::size_t trials = 0;  // 0 = default_trials(suite)
  std::size_t horizon = 200;
  std::optional<double> stepsize;  // overrides the per-algorithm default
  std::uint64_t seed = 1;
};

struct AuditResult {
  int exit_code = 0;  // 0 pass, 1 fail, 2 rejected
  nlohmann::json report;
};

AuditResult run_audit_suite(AuditSuite suite, const AuditOptions& options);

}  // namespace efsim::tools
