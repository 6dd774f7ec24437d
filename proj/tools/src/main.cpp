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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "efsim/error.hpp"
#include "efsim_tools/audit_suites.hpp"
#include "efsim_tools/config.hpp"
#include "efsim_tools/experiment.hpp"
#include "efsim_tools/report.hpp"

namespace {

constexpr const char* kOutputRootEnv = "EFSIM_OUTPUT_ROOT";

int config_failure(const std::string& path, const efsim::tools::ConfigError& e) {
  std::cerr << "efsim: " << path;
  if (e.line() > 0) std::cerr << ":" << e.line();
  std::cerr << ": " << e.field() << ": " << e.what() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-feedback SGD simulator"};
  app.set_version_flag("--version", EFSIM_VERSION_STRING);
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = 0;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("-j,--jobs", jobs, "Parallel tasks (default: available cores)");

  std::string suite_name;
  efsim::tools::AuditOptions audit_options;
  double audit_stepsize = 0.0;
  std::string audit_output;
  auto* audit_cmd = app.add_subcommand("audit", "Run an audit suite");
  audit_cmd->add_option("suite", suite_name, "Suite name")
      ->required()
      ->check(CLI::IsMember(efsim::tools::suite_names()));
  audit_cmd->add_option("--trials", audit_options.trials, "Trials (seeds for lemma suites)");
  audit_cmd->add_option("--horizon", audit_options.horizon, "Iterations for lemma suites");
  auto* stepsize_opt = audit_cmd->add_option("--stepsize", audit_stepsize, "Constant stepsize");
  audit_cmd->add_option("--seed", audit_options.seed, "Base seed");
  audit_cmd->add_option("-o,--output", audit_output, "Write the JSON report here");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Summarize a run directory");
  report_cmd->add_option("dir", report_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) {
    try {
      const auto config = efsim::tools::load_config(config_path);
      efsim::tools::RunExperimentOptions options;
      options.jobs = jobs;
      if (const char* root = std::getenv(kOutputRootEnv); root && *root) options.output_root = root;
      const auto outcome = efsim::tools::run_experiment(config, options);
      if (outcome.exit_code != 0) {
        std::cerr << "efsim: " << outcome.message << "\n";
        return outcome.exit_code;
      }
      std::cout << outcome.message << "\n";
      return 0;
    } catch (const efsim::tools::ConfigError& e) {
      return config_failure(config_path, e);
    } catch (const efsim::Error& e) {
      std::cerr << "efsim: " << config_path << ": " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "efsim: " << e.what() << "\n";
      return 1;
    }
  }

  if (*audit_cmd) {
    if (*stepsize_opt) audit_options.stepsize = audit_stepsize;
    const auto result =
        efsim::tools::run_audit_suite(efsim::tools::parse_suite(suite_name), audit_options);
    const std::string text = result.report.dump(2);
    if (!audit_output.empty()) {
      std::ofstream out(audit_output);
      out << text << "\n";
      if (!out) {
        std::cerr << "efsim: cannot write " << audit_output << "\n";
        return 1;
      }
    }
    std::cout << text << "\n";
    return result.exit_code;
  }

  try {
    std::cout << efsim::tools::render_report(report_dir);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "efsim: " << e.what() << "\n";
    return 2;
  }
}
