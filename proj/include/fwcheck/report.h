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

#pragma once

// The verification workflow (coherence, then conformance) and its reports.

#include <optional>
#include <string>
#include <vector>

#include "fwcheck/conformance_engine.h"
#include "fwcheck/job.h"
#include "fwcheck/policy_model.h"
#include "json.hpp"

namespace fwcheck {

enum class RunMode { kCoherenceOnly, kFull };
enum class ReportFormat { kHuman, kJson };

struct RunOptions {
  RunMode mode = RunMode::kFull;
  // Re-check every verdict and witness with the brute-force oracle on a
  // downscaled copy of the job.
  bool with_oracle = false;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitIncoherent = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitOracleMismatch = 4;

enum class ViolationKind {
  kDenyRuleClash,
  kUncoveredResidual,
  kRestrictiveLeak
};

std::string_view ViolationKindName(ViolationKind kind);

// One failing (element, path[, firewall]) verdict, flattened for reporting.
struct Violation {
  std::string element;
  std::string directive;
  Action action = Action::kAccept;
  int path_index = 0;
  FirewallSequence path;
  std::string firewall;
  int firewall_index = 0;
  ViolationKind kind = ViolationKind::kUncoveredResidual;
  // Clashing deny rule, or the first accept rule of the last firewall that
  // passes leaked packets. Absent for residuals and default-policy leaks.
  std::optional<int> rule;
  PacketSet residual;
  HeaderPoint witness;
  std::string hint_class;
  std::string hint;
};

std::vector<Violation> CollectViolations(const ConformanceReport& report);

struct OracleAgreement {
  bool agree = true;
  int elements_checked = 0;
  UniverseSpec universe;
  std::vector<std::string> mismatches;
};

struct VerificationReport {
  RunMode mode = RunMode::kFull;
  CoherenceReport coherence;
  std::optional<ConformanceReport> conformance;
  std::vector<Violation> violations;
  std::optional<OracleAgreement> oracle;
  std::vector<std::string> warnings;
};

VerificationReport Run(const VerificationJob& job, const RunOptions& options);

// Pure function of the report.
int ExitCode(const VerificationReport& report);

nlohmann::ordered_json ToJson(const VerificationReport& report);
std::string EmitReport(const VerificationReport& report, ReportFormat format);

nlohmann::ordered_json CubeToJson(const HeaderCube& cube);
HeaderCube CubeFromJson(const nlohmann::ordered_json& j);
nlohmann::ordered_json SetToJson(const PacketSet& set);
PacketSet SetFromJson(const nlohmann::ordered_json& j);
nlohmann::ordered_json PointToJson(const HeaderPoint& p);

}  // namespace fwcheck
