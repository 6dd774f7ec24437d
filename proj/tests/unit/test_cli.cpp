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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EFSIM_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, UnknownAlgorithmExitsTwo) {
  const auto p = write_config("efsim-cli-bad.ini", "[algorithm]\nkind = adam\n");
  EXPECT_EQ(run_cli("run " + p.string()), 2);
}

TEST(Cli, MissingConfigExitsTwo) { EXPECT_EQ(run_cli("run /nonexistent/efsim.ini"), 2); }

TEST(Cli, DivergenceExitsThree) {
  const fs::path out = fs::temp_directory_path() / "efsim-cli-div";
  fs::remove_all(out);
  const auto p = write_config("efsim-cli-div.ini",
                              "[experiment]\nhorizon = 300\nseeds = 1\noutput = " + out.string() +
                                  "\n[schedule]\ngamma = 5\nenforce_caps = false\n");
  EXPECT_EQ(run_cli("run " + p.string()), 3);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, RunAndReport) {
  const fs::path root = fs::temp_directory_path() / "efsim-cli-root";
  fs::remove_all(root);
  const auto p = write_config("efsim-cli-ok.ini", "[experiment]\nhorizon = 50\nseeds = 1-2\noutput = ok\n");
  EXPECT_EQ(std::system(("EFSIM_OUTPUT_ROOT=" + root.string() + " " + EFSIM_BINARY + " run --jobs 2 " +
                         p.string() + " > /dev/null")
                            .c_str()),
            0);
  EXPECT_TRUE(fs::exists(root / "ok" / "manifest.json"));
  EXPECT_EQ(run_cli("report " + (root / "ok").string()), 0);
  EXPECT_EQ(run_cli("report " + (root / "missing").string()), 2);
  fs::remove_all(root);
}

TEST(Cli, AuditSuites) {
  EXPECT_EQ(run_cli("audit compressor --trials 2000"), 0);
  EXPECT_EQ(run_cli("audit lemma-dsgd --trials 20 --horizon 50"), 0);
  EXPECT_EQ(run_cli("audit descent --stepsize 1"), 2);
  EXPECT_EQ(run_cli("audit compressor --trials 10"), 2);
  EXPECT_EQ(run_cli("audit nonsense"), 2);
}
