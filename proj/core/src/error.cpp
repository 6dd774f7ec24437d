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
#include "efsim/error.hpp"

#include <sstream>

namespace efsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter:
      return "invalid-parameter";
    case ErrorCode::degenerate_design:
      return "degenerate-design";
    case ErrorCode::requires_strong_convexity:
      return "requires-strong-convexity";
    case ErrorCode::configuration_rejected:
      return "configuration-rejected";
    case ErrorCode::divergence:
      return "divergence";
    case ErrorCode::cannot_fit:
      return "cannot-fit";
    case ErrorCode::invalid_comparison:
      return "invalid-comparison";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {

std::string divergence_message(std::size_t iteration, double subopt) {
  std::ostringstream os;
  os << "run diverged at iteration " << iteration << " (f(x_t) - f* = " << subopt << ")";
  return os.str();
}

}  // namespace

DivergenceError::DivergenceError(std::size_t iteration, double suboptimality)
    : Error(ErrorCode::divergence, divergence_message(iteration, suboptimality)),
      iteration_(iteration),
      suboptimality_(suboptimality) {}

void throw_invalid(const std::string& what) { throw Error(ErrorCode::invalid_parameter, what); }

}  // namespace efsim
