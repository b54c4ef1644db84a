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

#include "fwcheck/conformance_engine.h"

#include <algorithm>
#include <tuple>

#include "fwcheck/errors.h"

namespace fwcheck {
namespace {

const FirewallConfig& Lookup(const FirewallTable& firewalls,
                             const std::string& id) {
  auto it = firewalls.find(id);
  if (it == firewalls.end())
    throw InputError("paths", "unknown firewall " + id);
  return it->second;
}

std::string ConflictSummary(const std::vector<Conflict>& conflicts) {
  std::string msg = "policy is incoherent:";
  for (const Conflict& c : conflicts)
    msg += " (" + c.first + ", " + c.second + ")";
  return msg;
}

}  // namespace

std::string_view PositiveFailureName(PositiveFailure cause) {
  return cause == PositiveFailure::kDenyRuleClash ? "deny-rule-clash"
                                                  : "uncovered-residual";
}

PositiveVerdict PositiveCheck(const FirewallConfig& firewall,
                              const PacketSet& domain) {
  PositiveVerdict verdict;
  if (IsEmpty(domain)) return verdict;

  const bool default_deny = firewall.default_action() == Action::kDeny;
  PacketSet seen;
  PacketSet residual = domain;
  for (const FilteringRule& rule : firewall.rules()) {
    PacketSet dom(rule.filter);
    PacketSet effective = Difference(dom, seen);
    if (rule.action == Action::kDeny) {
      PacketSet clash = Intersect(effective, domain);
      if (!IsEmpty(clash)) {
        verdict.success = false;
        verdict.cause = PositiveFailure::kDenyRuleClash;
        verdict.rule_order = rule.order;
        verdict.witness = Witness(clash);
        verdict.failure_set = std::move(clash);
        return verdict;
      }
    } else if (default_deny) {
      residual = Difference(residual, effective);
    }
    seen = Union(seen, dom);
  }
  if (default_deny && !IsEmpty(residual)) {
    verdict.success = false;
    verdict.cause = PositiveFailure::kUncoveredResidual;
    verdict.witness = Witness(residual);
    verdict.failure_set = std::move(residual);
  }
  return verdict;
}

RestrictiveVerdict RestrictiveCheck(const FirewallPath& path,
                                    const PacketSet& domain) {
  RestrictiveVerdict verdict;
  if (IsEmpty(domain)) {
    verdict.blocked_at = path.empty() ? 0 : 1;
    return verdict;
  }

  PacketSet carried = domain;
  for (size_t n = 0; n < path.size(); ++n) {
    const FirewallConfig& fw = path[n];
    const bool default_accept = fw.default_action() == Action::kAccept;
    PacketSet seen;
    // Under a deny default this collects what the firewall accepts; under an
    // accept default it starts from the carried set and loses what is denied.
    PacketSet accepted = default_accept ? carried : PacketSet();
    for (const FilteringRule& rule : fw.rules()) {
      PacketSet dom(rule.filter);
      PacketSet effective = Difference(dom, seen);
      if (rule.action == Action::kAccept && !default_accept) {
        accepted = Union(accepted, effective);
      } else if (rule.action == Action::kDeny && default_accept) {
        accepted = Difference(accepted, effective);
      }
      seen = Union(seen, dom);
    }
    PacketSet residual =
        default_accept ? std::move(accepted) : Intersect(carried, accepted);
    verdict.carried.push_back(residual);
    if (IsEmpty(residual)) {
      verdict.blocked_at = static_cast<int>(n) + 1;
      return verdict;
    }
    carried = std::move(residual);
  }

  verdict.success = false;
  verdict.witness = Witness(carried);
  if (!path.empty()) {
    const FirewallConfig& last = path.back();
    std::vector<PacketSet> effective = EffectiveDomains(last);
    PacketSet by_rules;
    for (size_t i = 0; i < effective.size(); ++i) {
      if (last.rules()[i].action != Action::kAccept) continue;
      if (!IsEmpty(Intersect(effective[i], carried))) {
        verdict.accepting_rules.push_back(static_cast<int>(i) + 1);
      }
      by_rules = Union(by_rules, effective[i]);
    }
    verdict.leaked_via_default = !IsSubset(carried, by_rules);
  }
  verdict.leaked = std::move(carried);
  return verdict;
}

DirectiveCheck CheckDirective(const EffectiveElement& element,
                              const Topology& topology,
                              const FirewallTable& firewalls) {
  const PolicyElement& e = element.element;
  DirectiveCheck check;
  check.element_id = e.id;
  check.directive_id = e.source_directive;
  check.kind = e.kind;
  check.action = e.action;
  if (IsEmpty(element.effective_domain)) {
    check.vacuous = true;
    return check;
  }

  std::vector<FirewallSequence> paths =
      topology.PathsFor(e.src_zone, e.dst_zone);
  for (size_t i = 0; i < paths.size(); ++i) {
    PathCheck pc;
    pc.index = static_cast<int>(i) + 1;
    pc.firewalls = paths[i];
    FirewallPath resolved;
    for (const std::string& id : paths[i]) {
      resolved.push_back(std::cref(Lookup(firewalls, id)));
    }
    if (e.action == Action::kAccept) {
      for (const FirewallConfig& fw : resolved) {
        PositiveVerdict v = PositiveCheck(fw, element.effective_domain);
        pc.success = pc.success && v.success;
        pc.positive.push_back(std::move(v));
      }
    } else {
      pc.restrictive = RestrictiveCheck(resolved, element.effective_domain);
      pc.success = pc.restrictive->success;
    }
    check.success = check.success && pc.success;
    check.paths.push_back(std::move(pc));
  }
  return check;
}

PolicyIncoherent::PolicyIncoherent(std::vector<Conflict> conflicts)
    : PolicyError(ConflictSummary(conflicts)),
      conflicts_(std::move(conflicts)) {}

ConformanceReport CheckConformance(const EffectivePolicy& policy,
                                   const FirewallTable& firewalls,
                                   const Topology& topology) {
  CoherenceReport coherence = CheckCoherence(policy);
  if (!coherence.coherent)
    throw PolicyIncoherent(std::move(coherence.conflicts));

  ConformanceReport report;
  for (const auto& [id, fw] : firewalls) {
    for (int order : ShadowedRules(fw)) {
      report.warnings.push_back("firewall " + id + ": rule " +
                                std::to_string(order) +
                                " is shadowed by earlier rules");
    }
  }
  for (const EffectiveElement& e : policy.elements) {
    DirectiveCheck check = CheckDirective(e, topology, firewalls);
    if (check.vacuous) {
      report.warnings.push_back("element " + check.element_id +
                                ": effective domain is empty");
    }
    report.conform = report.conform && check.success;
    report.directives.push_back(std::move(check));
  }
  std::stable_sort(report.directives.begin(), report.directives.end(),
                   [](const DirectiveCheck& a, const DirectiveCheck& b) {
                     return std::tie(a.directive_id, a.element_id) <
                            std::tie(b.directive_id, b.element_id);
                   });
  return report;
}

}  // namespace fwcheck
