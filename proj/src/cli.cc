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

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "fwcheck/errors.h"
#include "fwcheck/job.h"
#include "fwcheck/report.h"

namespace fwcheck {

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{
      "Checks distributed firewall configurations against a "
      "security policy."};
  app.require_subcommand(1);

  struct Args {
    std::string policy;
    std::string topology;
    std::string priorities;
    std::string report;
    ReportFormat format = ReportFormat::kHuman;
    bool oracle = false;
  } args;

  const std::map<std::string, ReportFormat> formats = {
      {"human", ReportFormat::kHuman}, {"json", ReportFormat::kJson}};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--policy", args.policy, "Policy document")->required();
    sub->add_option("--topology", args.topology,
                    "Topology document (zones, firewalls, paths)")
        ->required();
    sub->add_option("--priorities", args.priorities, "Priorities document");
    sub->add_option("--report", args.report, "Write the report to this file");
    sub->add_option("--format", args.format, "Report format: human or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };
  CLI::App* coherence =
      app.add_subcommand("coherence", "Check the policy for conflicts");
  add_common(coherence);
  CLI::App* verify = app.add_subcommand(
      "verify", "Check coherence, then conformance of every firewall path");
  add_common(verify);
  verify->add_flag("--oracle", args.oracle,
                   "Also run the brute-force oracle and require agreement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  JobPaths paths{args.policy, args.topology, std::nullopt};
  if (!args.priorities.empty()) paths.priorities = args.priorities;
  RunOptions options;
  options.mode = coherence->parsed() ? RunMode::kCoherenceOnly : RunMode::kFull;
  options.with_oracle = args.oracle;

  VerificationReport report;
  try {
    VerificationJob job = LoadJob(paths);
    report = Run(job, options);
  } catch (const InputError& e) {
    err << "input error:\n";
    for (const std::string& p : e.problems()) err << "  " << p << "\n";
    return kExitInputError;
  } catch (const PolicyError& e) {
    err << "policy error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::string text = EmitReport(report, args.format);
  if (args.report.empty()) {
    out << text;
  } else {
    std::ofstream file(args.report, std::ios::binary);
    if (!file) {
      err << "cannot write report to " << args.report << "\n";
      return kExitInputError;
    }
    file << text;
  }
  return ExitCode(report);
}

}  // namespace fwcheck
