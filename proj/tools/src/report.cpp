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
#include "efsim_tools/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace efsim::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string mean_se(const json& j) {
  return fmt(j.at("mean").get<double>()) + " +- " + fmt(j.at("std_error").get<double>());
}

}  // namespace

std::string render_report(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  std::ostringstream os;
  os << manifest.value("name", "experiment") << "  (efsim " << manifest.value("version", "?")
     << ", fingerprint " << manifest.value("config_fingerprint", "").substr(0, 12) << ")\n";
  os << "objective " << manifest["objective"].value("name", "?") << ", oracle "
     << manifest["oracle"].value("kind", "?") << ", T = " << manifest.value("horizon", 0)
     << ", seeds = " << manifest["seeds"].size() << "\n\n";

  std::string metric = "averaged";
  for (const auto& point : manifest.at("points")) {
    const std::string id = point.at("id");
    const json summary = read_json(dir / id / "summary.json");
    const json& fin = summary.at("final");
    metric = fin.value("metric", "averaged");
    os << id << "  [" << summary.value("algorithm", "") << "]\n";
    os << "  stepsize " << summary.value("stepsize", "") << ", weights " << summary.value("weights", "");
    if (!summary["kappa"].is_null()) os << ", kappa " << fmt(summary["kappa"].get<double>());
    os << "\n";
    os << "  f(x_T) - f* " << mean_se(fin.at("last_iterate_subopt")) << "\n";
    os << "  f(x_bar) - f* " << mean_se(fin.at("averaged_subopt")) << "\n";
    os << "  weighted mean of f(x_t) - f* " << mean_se(fin.at("weighted_subopt")) << "\n";
    os << "  slope (last decade) "
       << (summary["slope_last_decade"].is_null() ? std::string("n/a")
                                                  : fmt(summary["slope_last_decade"].get<double>()))
       << "\n";
  }

  if (fs::exists(dir / "robustness_report.json")) {
    for (const auto& r : read_json(dir / "robustness_report.json").at("reports")) {
      os << "\ndelay robustness (" << r.value("metric", metric) << ")";
      if (!r.value("group", "").empty()) os << " " << r.value("group", "");
      os << ": max ratio " << fmt(r.at("max_ratio").get<double>()) << " vs threshold "
         << fmt(r.at("threshold").get<double>()) << (r.at("flagged").get<bool>() ? "  FLAGGED" : "  ok")
         << "\n";
    }
  }
  if (fs::exists(dir / "variance_report.json")) {
    for (const auto& r : read_json(dir / "variance_report.json").at("reports")) {
      os << "\nvariance reduction (" << r.value("metric", metric) << ")";
      if (!r.value("group", "").empty()) os << " " << r.value("group", "");
      if (r.at("applicable").get<bool>() && !r["exponent"].is_null()) {
        os << ": fitted exponent of K " << fmt(r["exponent"].get<double>()) << "\n";
      } else {
        os << ": " << r.value("note", "not applicable") << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace efsim::tools
