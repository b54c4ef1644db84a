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

// Security policies: directives with exceptions, their decomposition into
// single-action elements, priority resolution, and coherence.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwcheck/firewall_model.h"
#include "fwcheck/packetspace.h"

namespace fwcheck {

// A traffic pattern already resolved against the zone table. The zone ids
// are kept for path lookup; `src`/`dst` may be narrower than the zone (a
// single machine inside it, for instance).
struct TrafficPattern {
  std::string src_zone;
  std::string dst_zone;
  AddressSet src;
  AddressSet dst;
  ProtocolSet protocols = ProtocolSet::All();
  PortRange ports = kAllPorts;

  PacketSet Domain() const;
};

struct DirectiveException {
  std::string id;
  TrafficPattern pattern;
};

struct SecurityDirective {
  std::string id;
  TrafficPattern condition;
  Action action = Action::kDeny;
  std::vector<DirectiveException> exceptions;
};

enum class ElementKind { kSimpleDirective, kDirectiveRemainder, kException };

std::string_view ElementKindName(ElementKind kind);

struct PolicyElement {
  std::string id;
  std::string source_directive;
  ElementKind kind = ElementKind::kSimpleDirective;
  Action action = Action::kDeny;
  PacketSet raw_domain;
  std::string src_zone;
  std::string dst_zone;
};

// One element per directive (its condition minus its exceptions) followed by
// one element per exception with the opposite action. Throws InputError for
// duplicate ids or an exception that carves nothing out of its condition.
std::vector<PolicyElement> ExtractElements(
    std::span<const SecurityDirective> directives);

// Two elements with opposite actions and overlapping domains. `first`
// precedes `second` in element order.
struct Conflict {
  std::string first;
  std::string second;
  PacketSet overlap;
  HeaderPoint witness;
};

// Conflicts between raw element domains.
std::vector<Conflict> DetectConflicts(std::span<const PolicyElement> elements);

// before[x] lists the elements that take priority over element x.
struct PriorityRelation {
  std::map<std::string, std::vector<std::string>> before;
};

// A cycle in the priority graph as a closed walk (first id repeated at the
// end), or an empty vector when the graph is acyclic.
std::vector<std::string> FindPriorityCycle(const PriorityRelation& priorities);

struct EffectiveElement {
  PolicyElement element;
  PacketSet effective_domain;
};

struct EffectivePolicy {
  // Extraction order.
  std::vector<EffectiveElement> elements;

  std::vector<const EffectiveElement*> accept_elements() const;
  std::vector<const EffectiveElement*> deny_elements() const;
  const EffectiveElement* find(std::string_view id) const;
};

// Each element's raw domain minus the effective domains of the elements
// that take priority over it, resolved through the priority DAG. Throws
// PolicyError on unknown ids or a cycle.
EffectivePolicy EffectiveDomains(std::span<const PolicyElement> elements,
                                 const PriorityRelation& priorities);

struct CoherenceReport {
  bool coherent = true;
  std::vector<Conflict> conflicts;
};

CoherenceReport CheckCoherence(const EffectivePolicy& policy);

}  // namespace fwcheck
