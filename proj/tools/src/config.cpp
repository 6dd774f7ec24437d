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
#include "efsim_tools/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace efsim::tools {

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"name", "horizon", "seeds", "record_every", "output", "x0", "x0_scale"}},
      {"objective", {"kind", "dim", "mu", "L", "samples", "noise_level", "data_seed"}},
      {"oracle", {"kind", "sigma2", "M"}},
      {"algorithm", {"kind", "tau", "delay", "compressor", "delta", "k", "workers"}},
      {"schedule", {"preset", "kind", "gamma", "kappa", "weights", "enforce_caps"}},
      {"report", {"robustness_threshold", "metric"}},
  };
  return keys;
}

const std::vector<std::string> kAlgorithms = {"sgd", "dsgd", "ecsgd", "minibatch", "local"};
const std::vector<std::string> kRegimes = {"strongly-convex-decreasing",
                                           "strongly-convex-constant", "weakly-convex",
                                           "nonconvex"};

// "section.key" -> 1-based line number, for diagnostics.
std::map<std::string, std::size_t> locate_keys(const std::string& text) {
  std::map<std::string, std::size_t> lines;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    boost::trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = boost::trim_copy(line.substr(1, line.size() - 2));
      lines.emplace(section, number);
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      lines.emplace(section + "." + boost::trim_copy(line.substr(0, eq)), number);
    }
  }
  return lines;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::map<std::string, std::size_t> lines)
      : tree_(tree), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    const auto it = lines_.find(field);
    throw ConfigError(field, it == lines_.end() ? 0 : it->second, message);
  }

  std::optional<std::string> raw(const std::string& field) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'));
    if (!v) return std::nullopt;
    return boost::trim_copy(*v);
  }

  void text(const std::string& field, std::string& out) const {
    if (auto v = raw(field)) {
      if (v->empty()) fail(field, "empty value");
      out = *v;
    }
  }

  void choice(const std::string& field, std::string& out,
              const std::vector<std::string>& allowed) const {
    text(field, out);
    if (std::find(allowed.begin(), allowed.end(), out) == allowed.end()) {
      fail(field, "unknown value '" + out + "' (expected one of: " + boost::join(allowed, ", ") +
                      ")");
    }
  }

  template <class T>
  T parse_number(const std::string& field, const std::string& token) const {
    T value{};
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(field, "not a valid number: '" + token + "'");
    return value;
  }

  template <class T>
  void number(const std::string& field, T& out) const {
    if (auto v = raw(field)) out = parse_number<T>(field, *v);
  }

  template <class T>
  void optional_number(const std::string& field, std::optional<T>& out) const {
    if (auto v = raw(field)) out = parse_number<T>(field, *v);
  }

  template <class T>
  void list(const std::string& field, std::vector<T>& out) const {
    const auto v = raw(field);
    if (!v) return;
    std::vector<std::string> tokens;
    boost::split(tokens, *v, boost::is_any_of(","));
    std::vector<T> values;
    for (auto& token : tokens) {
      boost::trim(token);
      if (token.empty()) fail(field, "empty list entry");
      values.push_back(parse_number<T>(field, token));
    }
    out = std::move(values);
  }

  // "1-20" or "1, 2, 5".
  void seeds(const std::string& field, std::vector<std::uint64_t>& out) const {
    const auto v = raw(field);
    if (!v) return;
    const auto dash = v->find('-');
    if (dash != std::string::npos && v->find(',') == std::string::npos) {
      const auto lo = parse_number<std::uint64_t>(field, boost::trim_copy(v->substr(0, dash)));
      const auto hi = parse_number<std::uint64_t>(field, boost::trim_copy(v->substr(dash + 1)));
      if (hi < lo) fail(field, "empty seed range");
      out.clear();
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      return;
    }
    list(field, out);
  }

  void flag(const std::string& field, bool& out) const {
    const auto v = raw(field);
    if (!v) return;
    const std::string s = boost::to_lower_copy(*v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
      out = true;
    } else if (s == "false" || s == "no" || s == "off" || s == "0") {
      out = false;
    } else {
      fail(field, "expected true or false, got '" + *v + "'");
    }
  }

 private:
  const pt::ptree& tree_;
  std::map<std::string, std::size_t> lines_;
};

void check_known_fields(const pt::ptree& tree, const Reader& reader) {
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) reader.fail(section, "key outside of any section");
      reader.fail(section, "unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        reader.fail(section + "." + key, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

void validate(const ExperimentConfig& c, const Reader& r) {
  auto need = [&r](bool ok, const std::string& field, const std::string& message) {
    if (!ok) r.fail(field, message);
  };
  need(c.horizon >= 1, "experiment.horizon", "horizon must be >= 1");
  need(!c.seeds.empty(), "experiment.seeds", "at least one seed is required");
  need(c.record_every >= 1, "experiment.record_every", "record_every must be >= 1");
  need(std::isfinite(c.x0_scale), "experiment.x0_scale", "x0_scale must be finite");
  {
    std::set<std::uint64_t> unique(c.seeds.begin(), c.seeds.end());
    need(unique.size() == c.seeds.size(), "experiment.seeds", "seeds must be distinct");
  }

  const auto& o = c.objective;
  need(o.dim >= 1, "objective.dim", "dim must be >= 1");
  if (o.kind == "quadratic") {
    need(o.mu > 0.0, "objective.mu", "quadratic needs mu > 0");
    need(o.mu <= o.smoothness, "objective.mu", "mu must not exceed L");
  }
  if (o.kind == "nonconvex-radial") {
    need(o.dim >= 2, "objective.dim", "nonconvex-radial needs dim >= 2");
    need(o.mu >= 0.0, "objective.mu", "mu must be >= 0");
  }
  if (o.kind == "least-squares") {
    need(o.samples >= o.dim, "objective.samples", "least-squares needs samples >= dim");
    need(o.noise_level >= 0.0, "objective.noise_level", "noise_level must be >= 0");
  }

  need(c.oracle.sigma2 >= 0.0, "oracle.sigma2", "sigma2 must be >= 0");
  need(c.oracle.m >= 0.0, "oracle.M", "M must be >= 0");
  if (c.oracle.kind == "finite-sum") {
    need(o.kind == "least-squares", "oracle.kind", "finite-sum sampling needs a least-squares objective");
  }

  const auto& a = c.algorithm;
  for (auto t : a.tau) need(t >= 1, "algorithm.tau", "tau must be >= 1");
  for (auto w : a.workers) need(w >= 1, "algorithm.workers", "workers must be >= 1");
  for (auto d : a.delta) need(d > 0.0 && d <= 1.0, "algorithm.delta", "delta must lie in (0, 1]");
  for (auto k : a.k) need(k >= 1 && k <= o.dim, "algorithm.k", "k must lie in [1, dim]");
  need(!a.tau.empty() && !a.workers.empty() && !a.delta.empty() && !a.k.empty(),
       "algorithm", "grid lists must not be empty");

  const auto& s = c.schedule;
  if (s.gamma) need(*s.gamma > 0.0, "schedule.gamma", "gamma must be positive");
  if (s.kappa) need(*s.kappa > 0.0, "schedule.kappa", "kappa must be positive");
  need(c.report.robustness_threshold > 0.0, "report.robustness_threshold",
       "threshold must be positive");
}

}  // namespace

std::size_t ExperimentConfig::line_of(const std::string& field) const {
  const auto it = key_lines.find(field);
  return it == key_lines.end() ? 0 : it->second;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  pt::ptree tree;
  {
    std::istringstream in(text);
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("", e.line(), e.message());
    }
  }
  const auto lines = locate_keys(text);
  const Reader r(tree, lines);
  check_known_fields(tree, r);

  ExperimentConfig c;
  c.source = source;
  c.key_lines = lines;
  r.text("experiment.name", c.name);
  r.number("experiment.horizon", c.horizon);
  r.seeds("experiment.seeds", c.seeds);
  r.number("experiment.record_every", c.record_every);
  r.text("experiment.output", c.output);
  r.choice("experiment.x0", c.x0, {"ones", "basis", "gaussian"});
  r.number("experiment.x0_scale", c.x0_scale);

  r.choice("objective.kind", c.objective.kind,
           {"quadratic", "star-convex-1d", "nonconvex-radial", "least-squares"});
  if (c.objective.kind == "star-convex-1d") {
    c.objective.dim = 1;
    c.objective.mu = 0.0;
  }
  if (c.objective.kind == "nonconvex-radial") {
    c.objective.dim = 10;
    c.objective.mu = 0.0;
  }
  if (c.objective.kind == "least-squares") c.objective.dim = 5;
  r.number("objective.dim", c.objective.dim);
  r.number("objective.mu", c.objective.mu);
  r.number("objective.L", c.objective.smoothness);
  r.number("objective.samples", c.objective.samples);
  r.number("objective.noise_level", c.objective.noise_level);
  r.number("objective.data_seed", c.objective.data_seed);
  if (c.objective.kind == "star-convex-1d" && c.objective.dim != 1) {
    r.fail("objective.dim", "star-convex-1d is one-dimensional");
  }

  r.choice("oracle.kind", c.oracle.kind, {"none", "additive", "finite-sum", "strong-growth"});
  r.number("oracle.sigma2", c.oracle.sigma2);
  r.number("oracle.M", c.oracle.m);

  // A preset names the algorithm and the regime: "<algorithm>-<regime>".
  std::string preset;
  r.text("schedule.preset", preset);
  std::string preset_algorithm;
  if (!preset.empty()) {
    for (const auto& alg : kAlgorithms) {
      for (const auto& regime : kRegimes) {
        if (preset == alg + "-" + regime) {
          preset_algorithm = alg;
          c.schedule.regime = regime;
        }
      }
    }
    if (c.schedule.regime.empty()) {
      r.fail("schedule.preset", "unknown preset '" + preset + "'");
    }
    c.algorithm.kind = preset_algorithm;
  }
  r.choice("algorithm.kind", c.algorithm.kind, kAlgorithms);
  if (!preset_algorithm.empty() && c.algorithm.kind != preset_algorithm) {
    r.fail("schedule.preset", "preset '" + preset + "' does not match algorithm.kind = " +
                                  c.algorithm.kind);
  }
  r.list("algorithm.tau", c.algorithm.tau);
  r.choice("algorithm.delay", c.algorithm.delay, {"fixed", "iid-bounded"});
  r.choice("algorithm.compressor", c.algorithm.compressor,
           {"identity", "rand-drop", "rand-coordinate", "top-k"});
  r.list("algorithm.delta", c.algorithm.delta);
  r.list("algorithm.k", c.algorithm.k);
  r.list("algorithm.workers", c.algorithm.workers);

  if (c.schedule.regime.empty()) {
    r.choice("schedule.kind", c.schedule.kind, {"constant", "inverse-time"});
    r.choice("schedule.weights", c.schedule.weights, {"uniform", "linear", "exponential"});
    r.optional_number("schedule.gamma", c.schedule.gamma);
    r.optional_number("schedule.kappa", c.schedule.kappa);
  } else {
    for (const char* key : {"schedule.kind", "schedule.weights", "schedule.gamma", "schedule.kappa"}) {
      if (r.raw(key)) r.fail(key, "cannot be combined with schedule.preset");
    }
  }
  r.flag("schedule.enforce_caps", c.schedule.enforce_caps);

  r.number("report.robustness_threshold", c.report.robustness_threshold);
  r.choice("report.metric", c.report.metric, {"last", "averaged", "weighted"});

  validate(c, r);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join_numbers(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_number(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> f;
  f["experiment.name"] = name;
  f["experiment.horizon"] = std::to_string(horizon);
  f["experiment.seeds"] = join_numbers(seeds);
  f["experiment.record_every"] = std::to_string(record_every);
  f["experiment.output"] = output;
  f["experiment.x0"] = x0;
  f["experiment.x0_scale"] = format_number(x0_scale);
  f["objective.kind"] = objective.kind;
  f["objective.dim"] = std::to_string(objective.dim);
  f["objective.mu"] = format_number(objective.mu);
  f["objective.L"] = format_number(objective.smoothness);
  f["objective.samples"] = std::to_string(objective.samples);
  f["objective.noise_level"] = format_number(objective.noise_level);
  f["objective.data_seed"] = std::to_string(objective.data_seed);
  f["oracle.kind"] = oracle.kind;
  f["oracle.sigma2"] = format_number(oracle.sigma2);
  f["oracle.M"] = format_number(oracle.m);
  f["algorithm.kind"] = algorithm.kind;
  f["algorithm.tau"] = join_numbers(algorithm.tau);
  f["algorithm.delay"] = algorithm.delay;
  f["algorithm.compressor"] = algorithm.compressor;
  f["algorithm.delta"] = join_numbers(algorithm.delta);
  f["algorithm.k"] = join_numbers(algorithm.k);
  f["algorithm.workers"] = join_numbers(algorithm.workers);
  f["schedule.regime"] = schedule.regime;
  f["schedule.kind"] = schedule.kind;
  f["schedule.gamma"] = schedule.gamma ? format_number(*schedule.gamma) : "default";
  f["schedule.kappa"] = schedule.kappa ? format_number(*schedule.kappa) : "default";
  f["schedule.weights"] = schedule.weights;
  f["schedule.enforce_caps"] = schedule.enforce_caps ? "true" : "false";
  f["report.robustness_threshold"] = format_number(report.robustness_threshold);
  f["report.metric"] = report.metric;
  std::string out;
  for (const auto& [key, value] : f) out += key + " = " + value + "\n";
  return out;
}

}  // namespace efsim::tools
