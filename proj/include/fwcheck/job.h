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

// Loading and validating a verification job from its JSON documents.
//
// Topology document:
//   {"zones":     [{"id", "addresses": [addr...], "parent"?}],
//    "firewalls": [{"id", "default": "accept"|"deny",
//                   "rules": [{"src_adr", "dst_adr", "protocol",
//                              "dst_port", "action"}]}],
//    "paths":     [{"src", "dst", "paths": [[firewall id...]...]}],
//    "adjacency"?: [[node, node]...]}
//
// Policy document:
//   {"directives": [{"id", "action", "src", "dst", "protocol", "port",
//                    "exceptions"?: [{"id", "src", "dst", "protocol",
//                                     "port"}]}]}
// where src/dst is a zone id or {"zone": id, "address": addr | [addr...]}.
//
// Priorities document:
//   {"priorities": [{"element": id, "before": [id...]}]}

#include <filesystem>
#include <optional>
#include <vector>

#include "fwcheck/conformance_engine.h"
#include "fwcheck/policy_model.h"
#include "fwcheck/topology.h"
#include "json.hpp"

namespace fwcheck {

struct JobPaths {
  std::filesystem::path policy;
  std::filesystem::path topology;
  std::optional<std::filesystem::path> priorities;
};

struct VerificationJob {
  Topology topology;
  FirewallTable firewalls;
  std::vector<std::string> firewall_order;  // declaration order
  std::vector<SecurityDirective> directives;
  std::vector<PolicyElement> elements;
  PriorityRelation priorities;

  // Every cube appearing in the inputs; the oracle model is built from these.
  std::vector<HeaderCube> InputCubes() const;
};

// Throws InputError listing every problem found across all documents.
VerificationJob ParseJob(const nlohmann::json& policy,
                         const nlohmann::json& topology,
                         const nlohmann::json* priorities = nullptr);

VerificationJob LoadJob(const JobPaths& paths);

}  // namespace fwcheck
