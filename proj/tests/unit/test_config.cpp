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
#include <gtest/gtest.h>

#include "efsim_tools/config.hpp"
#include "efsim_tools/fingerprint.hpp"

using namespace efsim::tools;

namespace {

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ConfigError";
  return ConfigError("", 0, "");
}

}  // namespace

TEST(Config, DefaultsFromEmptyText) {
  const auto c = parse_config("");
  EXPECT_EQ(c.algorithm.kind, "sgd");
  EXPECT_EQ(c.objective.kind, "quadratic");
  EXPECT_EQ(c.objective.dim, 20u);
  EXPECT_EQ(c.seeds.size(), 5u);
}

TEST(Config, GridsAndSeedRanges) {
  const auto c = parse_config(
      "[experiment]\nseeds = 3-7\n\n[algorithm]\nkind = dsgd\ntau = 1, 4, 16\n");
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4, 5, 6, 7}));
  EXPECT_EQ(c.algorithm.tau, (std::vector<std::size_t>{1, 4, 16}));
  EXPECT_EQ(parse_config("[experiment]\nseeds = 9, 2\n").seeds, (std::vector<std::uint64_t>{9, 2}));
}

TEST(Config, PresetSetsAlgorithmKind) {
  const auto c = parse_config("[schedule]\npreset = dsgd-strongly-convex-decreasing\n");
  EXPECT_EQ(c.algorithm.kind, "dsgd");
  EXPECT_EQ(c.schedule.regime, "strongly-convex-decreasing");
}

TEST(Config, UnknownAlgorithmNamesField) {
  const auto e = parse_error("[experiment]\nhorizon = 10\n\n[algorithm]\nkind = adam\n");
  EXPECT_EQ(e.field(), "algorithm.kind");
  EXPECT_EQ(e.line(), 5u);
  EXPECT_NE(std::string(e.what()).find("adam"), std::string::npos);
}

TEST(Config, UnknownKeyAndSection) {
  EXPECT_EQ(parse_error("[oracle]\nsigma = 1\n").field(), "oracle.sigma");
  EXPECT_EQ(parse_error("[solver]\nkind = x\n").field(), "solver");
}

TEST(Config, MalformedNumbers) {
  EXPECT_EQ(parse_error("[experiment]\nhorizon = ten\n").field(), "experiment.horizon");
  EXPECT_EQ(parse_error("[oracle]\nsigma2 = -1\n").field(), "oracle.sigma2");
  EXPECT_EQ(parse_error("[experiment]\nseeds = 5-2\n").field(), "experiment.seeds");
}

TEST(Config, PresetConflictsRejected) {
  EXPECT_EQ(parse_error("[algorithm]\nkind = local\n\n[schedule]\npreset = dsgd-weakly-convex\n").field(),
            "schedule.preset");
  EXPECT_EQ(parse_error("[schedule]\npreset = dsgd-weakly-convex\ngamma = 0.1\n").field(),
            "schedule.gamma");
  EXPECT_EQ(parse_error("[schedule]\npreset = dsgd-sometimes-convex\n").field(), "schedule.preset");
}

TEST(Config, SyntaxErrorReportsLine) {
  const auto e = parse_error("[experiment]\nhorizon = 10\nthis line is not ini\n");
  EXPECT_EQ(e.line(), 3u);
}

TEST(Config, FingerprintChangesWithEveryField) {
  const std::string base = "[experiment]\nhorizon = 100\n";
  const auto fp = [](const std::string& text) { return sha256_hex(parse_config(text).canonical()); };
  const std::string ref = fp(base);
  EXPECT_EQ(ref, fp(base));
  EXPECT_EQ(ref, fp("; comment\n" + base));
  const std::vector<std::string> variants = {
      "[experiment]\nhorizon = 101\n",
      base + "seeds = 1-4\n",
      base + "record_every = 5\n",
      base + "x0_scale = 2\n",
      base + "name = other\n",
      base + "\n[objective]\nmu = 0.2\n",
      base + "\n[objective]\ndim = 3\n",
      base + "\n[oracle]\nsigma2 = 0.5\n",
      base + "\n[algorithm]\nkind = dsgd\n",
      base + "\n[schedule]\ngamma = 0.01\n",
      base + "\n[schedule]\nenforce_caps = false\n",
      base + "\n[report]\nmetric = last\n",
  };
  for (const auto& v : variants) EXPECT_NE(fp(v), ref) << v;
}

TEST(Config, DefaultValuesSpelledOutKeepFingerprint) {
  const auto a = parse_config("[experiment]\nhorizon = 100\n");
  const auto b = parse_config("[experiment]\nhorizon = 100\n\n[objective]\ndim = 20\n");
  EXPECT_EQ(sha256_hex(a.canonical()), sha256_hex(b.canonical()));
}

TEST(Fingerprint, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
