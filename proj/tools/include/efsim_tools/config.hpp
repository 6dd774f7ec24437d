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
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace efsim::tools {

// Invalid configuration. `field` is "section.key"; line is 0 when the
// field is absent from the file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::size_t line, const std::string& message);

  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

struct ObjectiveConfig {
  std::string kind = "quadratic";  // quadratic | star-convex-1d | nonconvex-radial | least-squares
  std::size_t dim = 20;
  double mu = 0.1;
  double smoothness = 1.0;
  std::size_t samples = 100;  // least-squares n
  double noise_level = 0.5;
  std::uint64_t data_seed = 7;
};

struct OracleConfig {
  std::string kind = "additive";  // none | additive | finite-sum | strong-growth
  double sigma2 = 1.0;
  double m = 0.0;
};

// List-valued keys form a grid; every combination is one config point.
struct AlgorithmConfig {
  std::string kind = "sgd";  // sgd | dsgd | ecsgd | minibatch | local
  std::vector<std::size_t> tau{1};
  std::string delay = "fixed";  // fixed | iid-bounded
  std::string compressor = "identity";
  std::vector<double> delta{1.0};  // rand-coordinate
  std::vector<std::size_t> k{1};   // top-k
  std::vector<std::size_t> workers{1};
};

struct ScheduleConfig {
  std::string regime;                 // preset regime, empty for a manual schedule
  std::string kind = "constant";      // constant | inverse-time (manual)
  std::optional<double> gamma;        // constant; defaults to the theorem cap
  std::optional<double> kappa;        // inverse-time; defaults to the theorem kappa
  std::string weights = "uniform";    // uniform | linear | exponential (manual)
  bool enforce_caps = true;
};

struct ReportConfig {
  double robustness_threshold = 2.0;
  std::string metric = "averaged";  // last | averaged | weighted
};

struct ExperimentConfig {
  std::filesystem::path source;
  std::string name = "experiment";
  std::size_t horizon = 10000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t record_every = 10;
  std::string output = "efsim-out";
  std::string x0 = "ones";  // ones | basis | gaussian
  double x0_scale = 1.0;

  ObjectiveConfig objective;
  OracleConfig oracle;
  AlgorithmConfig algorithm;
  ScheduleConfig schedule;
  ReportConfig report;

  // "section.key" -> line in the source text; not part of the fingerprint.
  std::map<std::string, std::size_t> key_lines;

  std::size_t line_of(const std::string& field) const;

  // Canonical "section.key = value" listing of every effective field,
  // sorted; the fingerprint is its SHA-256.
  std::string canonical() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source = {});

}  // namespace efsim::tools
