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
#include <stdexcept>
#include <string>
#include <string_view>

namespace efsim {

enum class ErrorCode {
  invalid_parameter,
  degenerate_design,
  requires_strong_convexity,
  configuration_rejected,
  divergence,
  cannot_fit,
  invalid_comparison,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the engine when an iterate becomes non-finite or the
// suboptimality exceeds the divergence threshold.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, double suboptimality);

  std::size_t iteration() const noexcept { return iteration_; }
  double suboptimality() const noexcept { return suboptimality_; }

 private:
  std::size_t iteration_;
  double suboptimality_;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace efsim
