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

// Conformance of a distributed firewall configuration to an effective
// policy.
//
// Accept elements are checked firewall by firewall: every firewall on every
// path must accept the whole element domain (PositiveCheck). Deny elements
// are checked path by path: the packets not yet denied are carried from one
// firewall to the next, and some firewall must have denied all of them by
// the end of the path (RestrictiveCheck).

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwcheck/errors.h"
#include "fwcheck/firewall_model.h"
#include "fwcheck/packetspace.h"
#include "fwcheck/policy_model.h"
#include "fwcheck/topology.h"

namespace fwcheck {

using FirewallTable = std::map<std::string, FirewallConfig>;
using FirewallPath = std::vector<std::reference_wrapper<const FirewallConfig>>;

enum class PositiveFailure { kDenyRuleClash, kUncoveredResidual };

std::string_view PositiveFailureName(PositiveFailure cause);

struct PositiveVerdict {
  bool success = true;
  // Set on failure only.
  PositiveFailure cause = PositiveFailure::kUncoveredResidual;
  // Order of the clashing deny rule; 0 for an uncovered residual.
  int rule_order = 0;
  // The clash (deny rule effective part inside the domain) or the residual
  // left to the deny default.
  PacketSet failure_set;
  std::optional<HeaderPoint> witness;
};

// Single-firewall check of a positive element domain.
//
// Rules are scanned in order keeping D, the union of filters seen so far,
// and the residual, initially the domain. A deny rule whose effective part
// (filter minus D) meets the domain fails immediately. Under a deny default
// each accept rule removes its effective part from the residual, and a
// nonempty residual at the end fails. A default-accept firewall succeeds
// once every deny rule passed.
PositiveVerdict PositiveCheck(const FirewallConfig& firewall,
                              const PacketSet& domain);

struct RestrictiveVerdict {
  bool success = true;
  // 1-based position of the first firewall that leaves nothing of the
  // domain accepted. An empty domain counts as blocked at the first
  // firewall; 0 on failure or for an empty path.
  int blocked_at = 0;
  // Packets accepted by every firewall of the path (failure only).
  PacketSet leaked;
  // Packets still accepted after each firewall; carried[n-1] is the set
  // handed on by firewall n.
  std::vector<PacketSet> carried;
  // Accept rules of the last firewall whose effective domain meets `leaked`,
  // and whether part of the leak went through its default action instead.
  std::vector<int> accepting_rules;
  bool leaked_via_default = false;
  std::optional<HeaderPoint> witness;
};

// Path check of a restrictive element domain. The carried set starts as the
// domain. A default-accept firewall removes the effective part of each of
// its deny rules; a default-deny firewall keeps only what the effective part
// of one of its accept rules covers. The path succeeds at the first
// firewall that leaves the carried set empty; if it is still nonempty after
// the last firewall, that set leaked. An empty path leaks the whole domain.
RestrictiveVerdict RestrictiveCheck(const FirewallPath& path,
                                    const PacketSet& domain);

struct PathCheck {
  int index = 0;  // 1-based position in the catalog entry
  FirewallSequence firewalls;
  bool success = true;
  // Accept elements: one verdict per firewall, in path order.
  std::vector<PositiveVerdict> positive;
  // Deny elements.
  std::optional<RestrictiveVerdict> restrictive;
};

struct DirectiveCheck {
  std::string element_id;
  std::string directive_id;
  ElementKind kind = ElementKind::kSimpleDirective;
  Action action = Action::kDeny;
  bool success = true;
  // Empty effective domain: nothing to check, no paths visited.
  bool vacuous = false;
  std::vector<PathCheck> paths;
};

// Throws InputError when paths cannot be resolved or name an unknown
// firewall.
DirectiveCheck CheckDirective(const EffectiveElement& element,
                              const Topology& topology,
                              const FirewallTable& firewalls);

struct ConformanceReport {
  bool conform = true;
  // Ordered by directive id, then element id.
  std::vector<DirectiveCheck> directives;
  std::vector<std::string> warnings;
};

// Thrown when the policy handed to CheckConformance is not coherent.
class PolicyIncoherent : public PolicyError {
 public:
  explicit PolicyIncoherent(std::vector<Conflict> conflicts);
  const std::vector<Conflict>& conflicts() const { return conflicts_; }

 private:
  std::vector<Conflict> conflicts_;
};

ConformanceReport CheckConformance(const EffectivePolicy& policy,
                                   const FirewallTable& firewalls,
                                   const Topology& topology);

}  // namespace fwcheck
