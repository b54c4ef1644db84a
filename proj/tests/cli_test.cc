// Copyright 2026 The fwcheck authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fwcheck/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fwcheck/report.h"
#include "json.hpp"

namespace fwcheck {
namespace {

const std::string kCase = FWCHECK_DATA_DIR "/case_study/";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fwcheck");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST_CASE("coherence subcommand") {
  Result r = Cli({"coherence", "--policy", kCase + "policy_original.json",
                  "--topology", kCase + "topology_original.json"});
  CHECK(r.code == kExitIncoherent);
  CHECK(r.out.find("sd1 x sd3") != std::string::npos);

  r = Cli({"coherence", "--policy", kCase + "policy_fixed.json", "--topology",
           kCase + "topology_original.json"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("COHERENT") == 0);
}

TEST_CASE("verify subcommand") {
  Result r =
      Cli({"verify", "--policy", kCase + "policy_fixed.json", "--topology",
           kCase + "topology_original.json", "--format", "json", "--oracle"});
  CHECK(r.code == kExitViolations);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["exit_code"] == kExitViolations);
  CHECK(j["oracle"]["agree"] == true);

  r = Cli({"verify", "--policy", kCase + "policy_corrected_conform.json",
           "--topology", kCase + "topology_corrected.json"});
  CHECK(r.code == kExitOk);
}

TEST_CASE("report file matches standard output") {
  auto path = std::filesystem::temp_directory_path() / "fwcheck_report.json";
  std::vector<std::string> base = {"verify",
                                   "--policy",
                                   kCase + "policy_fixed.json",
                                   "--topology",
                                   kCase + "topology_original.json",
                                   "--format",
                                   "json"};
  Result printed = Cli(base);
  base.push_back("--report");
  base.push_back(path.string());
  Result written = Cli(base);
  CHECK(written.code == printed.code);
  CHECK(written.out.empty());
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == printed.out);
  std::filesystem::remove(path);
}

TEST_CASE("usage and input errors") {
  CHECK(Cli({}).code == kExitInputError);
  CHECK(Cli({"verify", "--policy", kCase + "policy_fixed.json"}).code ==
        kExitInputError);
  CHECK(Cli({"verify", "--policy", kCase + "policy_fixed.json", "--topology",
             kCase + "topology_original.json", "--format", "xml"})
            .code == kExitInputError);
  Result missing = Cli({"verify", "--policy", kCase + "nope.json", "--topology",
                        kCase + "topology_original.json"});
  CHECK(missing.code == kExitInputError);
  CHECK(missing.err.find("nope.json") != std::string::npos);
  CHECK(Cli({"--help"}).code == kExitOk);
}

}  // namespace
}  // namespace fwcheck
