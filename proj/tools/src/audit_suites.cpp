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
#include "efsim_tools/audit_suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "efsim/audit.hpp"
#include "efsim/compressor.hpp"
#include "efsim/engine.hpp"
#include "efsim/error.hpp"
#include "efsim/least_squares.hpp"
#include "efsim/objective.hpp"
#include "efsim/oracle.hpp"
#include "efsim/rng.hpp"
#include "efsim/schedule.hpp"

namespace efsim::tools {

using nlohmann::json;

namespace {

constexpr std::size_t kDim = 20;
constexpr double kMu = 0.1;
constexpr double kSmoothness = 1.0;
constexpr double kSigma2 = 1.0;

struct Entry {
  AuditSuite suite;
  const char* name;
};

constexpr Entry kSuites[] = {
    {AuditSuite::compressor, "compressor"}, {AuditSuite::noise, "noise"},
    {AuditSuite::lemma_dsgd, "lemma-dsgd"}, {AuditSuite::lemma_ecsgd, "lemma-ecsgd"},
    {AuditSuite::lemma_local, "lemma-local"}, {AuditSuite::descent, "descent"},
};

GradientOracle reference_oracle() {
  return GradientOracle::additive(make_quadratic(kDim, kMu, kSmoothness), kSigma2);
}

json audit_json(const LemmaAuditReport& r) {
  json points = json::array();
  // Points with zero spread (e.g. t = 0) carry no z-score.
  double worst = INFINITY;
  double min_slack = INFINITY;
  for (const auto& p : r.points) {
    if (p.std_error > 0.0) worst = std::min(worst, p.slack / p.std_error);
    min_slack = std::min(min_slack, p.slack);
    points.push_back({{"t", p.t},
                      {"lhs", p.lhs},
                      {"rhs", p.rhs},
                      {"slack", p.slack},
                      {"std_error", p.std_error},
                      {"passed", p.passed}});
  }
  return {{"lemma", std::string(to_string(r.lemma))},
          {"algorithm", r.algorithm},
          {"seeds", r.seeds},
          {"horizon", r.horizon},
          {"failures", r.failures},
          {"passed", r.passed()},
          {"min_slack", std::isfinite(min_slack) ? json(min_slack) : json(nullptr)},
          {"min_slack_over_se", std::isfinite(worst) ? json(worst) : json(nullptr)},
          {"points", points}};
}

double default_stepsize(const AlgorithmSpec& spec, const GradientOracle& oracle) {
  return theorem_stepsize_cap(oracle.objective().smoothness(), effective_tau(spec),
                              oracle.declared_m());
}

AuditResult lemma_suite(const std::vector<std::pair<LemmaKind, AlgorithmSpec>>& cases,
                        const AuditOptions& options, std::size_t seeds) {
  const GradientOracle oracle = reference_oracle();
  const Vec x0 = Vec::ones(kDim);
  AuditResult result;
  json audits = json::array();
  bool all_passed = true;
  for (const auto& [lemma, spec] : cases) {
    const double gamma = options.stepsize.value_or(default_stepsize(spec, oracle));
    const Engine engine(oracle, spec, StepsizeSchedule::constant(gamma), false);
    check_lemma_preconditions(lemma, engine, options.horizon);
    const LemmaAuditReport r = audit_lemma(lemma, engine, x0, seeds, options.horizon, options.seed);
    json j = audit_json(r);
    j["stepsize"] = gamma;
    all_passed = all_passed && r.passed();
    audits.push_back(std::move(j));
  }
  result.report["objective"] = {{"kind", "quadratic"}, {"dim", kDim}, {"mu", kMu}, {"L", kSmoothness}};
  result.report["oracle"] = {{"kind", "additive"}, {"sigma2", kSigma2}};
  result.report["audits"] = std::move(audits);
  result.report["passed"] = all_passed;
  result.exit_code = all_passed ? 0 : 1;
  return result;
}

AuditResult compressor_suite(const AuditOptions& options, std::size_t trials) {
  const std::vector<Compressor> compressors = {
      Compressor::identity(),          Compressor::rand_drop(2.0),
      Compressor::rand_drop(8.0),      Compressor::rand_coordinate(0.1),
      Compressor::rand_coordinate(0.5), Compressor::top_k(1, kDim),
      Compressor::top_k(5, kDim)};
  RngStream probe_rng(options.seed, 0, StreamPurpose::probe);
  const std::vector<Vec> probes = compressor_probes(kDim, probe_rng);

  AuditResult result;
  json operators = json::array();
  bool all_passed = true;
  for (std::size_t i = 0; i < compressors.size(); ++i) {
    const Compressor& c = compressors[i];
    RngStream rng(options.seed, static_cast<std::uint32_t>(i), StreamPurpose::audit);
    bool passed = true;
    double worst_ratio = 0.0;
    double worst_se = 0.0;
    for (const Vec& x : probes) {
      const ContractCheck check = check_contract(c, x, trials, rng);
      passed = passed && check.passed;
      if (check.ratio > worst_ratio) {
        worst_ratio = check.ratio;
        worst_se = check.std_error;
      }
    }
    RngStream delta_rng(options.seed, static_cast<std::uint32_t>(i), StreamPurpose::compressor);
    const double estimate = estimate_delta(c, kDim, trials, delta_rng);
    all_passed = all_passed && passed;
    operators.push_back({{"operator", c.describe()},
                         {"declared_delta", c.delta()},
                         {"estimated_delta", estimate},
                         {"worst_ratio", worst_ratio},
                         {"worst_ratio_std_error", worst_se},
                         {"bound", 1.0 - c.delta()},
                         {"slack", 1.0 - c.delta() - worst_ratio},
                         {"probes", probes.size()},
                         {"passed", passed}});
  }
  result.report["dim"] = kDim;
  result.report["operators"] = std::move(operators);
  result.report["passed"] = all_passed;
  result.exit_code = all_passed ? 0 : 1;
  return result;
}

AuditResult noise_suite(const AuditOptions& options, std::size_t trials) {
  constexpr std::size_t kPoints = 100;
  const auto quadratic = make_quadratic(kDim, kMu, kSmoothness);
  RngStream data(options.seed, 0, StreamPurpose::data);
  const auto least_squares = make_least_squares(100, 5, data, 0.5);
  const std::vector<GradientOracle> oracles = {
      GradientOracle::deterministic(quadratic),
      GradientOracle::additive(quadratic, kSigma2),
      GradientOracle::strong_growth(quadratic, 2.0),
      GradientOracle::finite_sum(least_squares),
  };

  AuditResult result;
  json reports = json::array();
  bool all_passed = true;
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    const GradientOracle& oracle = oracles[i];
    const Objective& f = oracle.objective();
    RngStream probe_rng(options.seed, static_cast<std::uint32_t>(i), StreamPurpose::probe);
    std::vector<Vec> points;
    for (std::size_t p = 0; p < kPoints; ++p) {
      Vec x = f.reference_point();
      const double radius = 0.1 * static_cast<double>(p % 20 + 1);
      x.axpy(1.0, gaussian_vector(probe_rng, f.dim(), radius * std::sqrt(static_cast<double>(f.dim()))));
      points.push_back(std::move(x));
    }
    RngStream rng(options.seed, static_cast<std::uint32_t>(i), StreamPurpose::audit);
    const NoiseAuditReport r = audit_noise(oracle, points, trials, rng);
    std::size_t flagged = 0;
    double min_slack = INFINITY;
    for (const auto& p : r.points) {
      flagged += p.flagged ? 1 : 0;
      const double slack =
          oracle.assumption() == NoiseAssumption::weak ? p.slack_weak : p.slack_general;
      min_slack = std::min(min_slack, slack);
    }
    all_passed = all_passed && r.passed();
    reports.push_back({{"oracle", std::string(to_string(oracle.kind()))},
                       {"objective", f.name()},
                       {"M", oracle.declared_m()},
                       {"sigma2", oracle.declared_sigma2()},
                       {"exact", !r.points.empty() && r.points.front().exact},
                       {"points", r.points.size()},
                       {"flagged", flagged},
                       {"min_slack", min_slack},
                       {"passed", r.passed()}});
  }
  result.report["oracles"] = std::move(reports);
  result.report["passed"] = all_passed;
  result.exit_code = all_passed ? 0 : 1;
  return result;
}

}  // namespace

std::string to_string(AuditSuite suite) {
  for (const auto& e : kSuites) {
    if (e.suite == suite) return e.name;
  }
  return "unknown";
}

AuditSuite parse_suite(const std::string& name) {
  for (const auto& e : kSuites) {
    if (name == e.name) return e.suite;
  }
  throw std::invalid_argument("unknown audit suite '" + name + "'");
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& e : kSuites) names.emplace_back(e.name);
  return names;
}

std::size_t minimum_trials(AuditSuite suite) {
  switch (suite) {
    case AuditSuite::compressor:
    case AuditSuite::noise:
      return 1000;
    default:
      return 10;
  }
}

std::size_t default_trials(AuditSuite suite) {
  switch (suite) {
    case AuditSuite::compressor:
    case AuditSuite::noise:
      return 10000;
    default:
      return 100;
  }
}

AuditResult run_audit_suite(AuditSuite suite, const AuditOptions& options) {
  const std::size_t trials = options.trials ? options.trials : default_trials(suite);
  AuditResult result;
  try {
    if (trials < minimum_trials(suite)) {
      throw Error(ErrorCode::invalid_parameter,
                  "suite " + to_string(suite) + " needs at least " +
                      std::to_string(minimum_trials(suite)) + " trials");
    }
    if (options.horizon == 0) throw Error(ErrorCode::invalid_parameter, "horizon must be positive");
    if (options.stepsize && !(*options.stepsize > 0.0)) {
      throw Error(ErrorCode::invalid_parameter, "stepsize must be positive");
    }
    switch (suite) {
      case AuditSuite::compressor:
        result = compressor_suite(options, trials);
        break;
      case AuditSuite::noise:
        result = noise_suite(options, trials);
        break;
      case AuditSuite::lemma_dsgd:
        result = lemma_suite({{LemmaKind::dsgd_error, DelayedSgd{4, DelayModel::fixed}}}, options, trials);
        break;
      case AuditSuite::lemma_ecsgd:
        result = lemma_suite({{LemmaKind::ecsgd_error, CompressedSgd{Compressor::rand_drop(4.0)}},
                              {LemmaKind::ecsgd_error, CompressedSgd{Compressor::top_k(5, kDim)}}},
                             options, trials);
        break;
      case AuditSuite::lemma_local:
        result = lemma_suite({{LemmaKind::local_dispersion, LocalSgd{4, 4}}}, options, trials);
        break;
      case AuditSuite::descent: {
        std::vector<std::pair<LemmaKind, AlgorithmSpec>> cases;
        const std::vector<AlgorithmSpec> specs = {
            PlainSgd{}, DelayedSgd{4, DelayModel::fixed},
            CompressedSgd{Compressor::rand_drop(4.0)}, LocalSgd{4, 4}};
        for (const auto& spec : specs) {
          cases.emplace_back(LemmaKind::descent_strong, spec);
          cases.emplace_back(LemmaKind::descent_nonconvex, spec);
        }
        result = lemma_suite(cases, options, trials);
        break;
      }
    }
  } catch (const Error& e) {
    result.exit_code = 2;
    result.report = json{{"passed", false},
                         {"error", std::string(to_string(e.code()))},
                         {"message", e.what()}};
  }
  result.report["suite"] = to_string(suite);
  result.report["trials"] = trials;
  if (suite != AuditSuite::compressor && suite != AuditSuite::noise) {
    result.report["horizon"] = options.horizon;
  }
  result.report["seed"] = options.seed;
  return result;
}

}  // namespace efsim::tools
