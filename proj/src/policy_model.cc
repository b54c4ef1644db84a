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

#include "fwcheck/policy_model.h"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "fwcheck/errors.h"

namespace fwcheck {
namespace {

std::vector<Conflict> PairwiseConflicts(
    const std::vector<std::pair<const PolicyElement*, const PacketSet*>>&
        items) {
  std::vector<Conflict> out;
  for (size_t i = 0; i < items.size(); ++i) {
    for (size_t j = i + 1; j < items.size(); ++j) {
      if (items[i].first->action == items[j].first->action) continue;
      PacketSet overlap = Intersect(*items[i].second, *items[j].second);
      if (IsEmpty(overlap)) continue;
      HeaderPoint w = *Witness(overlap);
      out.push_back(
          {items[i].first->id, items[j].first->id, std::move(overlap), w});
    }
  }
  return out;
}

}  // namespace

PacketSet TrafficPattern::Domain() const {
  std::vector<HeaderCube> cubes;
  for (const AddressRange& s : src) {
    for (const AddressRange& d : dst) {
      cubes.push_back(HeaderCube{s, d, protocols, ports});
    }
  }
  return PacketSet::FromCubes(cubes);
}

std::string_view ElementKindName(ElementKind kind) {
  switch (kind) {
    case ElementKind::kSimpleDirective:
      return "simple-directive";
    case ElementKind::kDirectiveRemainder:
      return "directive-remainder";
    case ElementKind::kException:
      return "exception";
  }
  return "?";
}

std::vector<PolicyElement> ExtractElements(
    std::span<const SecurityDirective> directives) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::vector<PolicyElement> out;
  auto claim = [&](const std::string& id) {
    if (!ids.insert(id).second)
      problems.push_back("duplicate element id " + id);
  };

  for (const SecurityDirective& d : directives) {
    claim(d.id);
    PacketSet condition = d.condition.Domain();
    std::vector<PolicyElement> exceptions;
    PacketSet carved;
    for (const DirectiveException& e : d.exceptions) {
      claim(e.id);
      PacketSet dom = e.pattern.Domain();
      if (IsEmpty(Intersect(dom, condition))) {
        problems.push_back("exception " + e.id + " of directive " + d.id +
                           " does not intersect its condition");
        continue;
      }
      carved = Union(carved, dom);
      exceptions.push_back({e.id, d.id, ElementKind::kException,
                            Opposite(d.action), std::move(dom),
                            e.pattern.src_zone, e.pattern.dst_zone});
    }
    out.push_back({d.id, d.id,
                   d.exceptions.empty() ? ElementKind::kSimpleDirective
                                        : ElementKind::kDirectiveRemainder,
                   d.action, Difference(condition, carved),
                   d.condition.src_zone, d.condition.dst_zone});
    for (PolicyElement& e : exceptions) out.push_back(std::move(e));
  }
  if (!problems.empty()) throw InputError(std::move(problems));
  return out;
}

std::vector<Conflict> DetectConflicts(std::span<const PolicyElement> elements) {
  std::vector<std::pair<const PolicyElement*, const PacketSet*>> items;
  for (const PolicyElement& e : elements) items.push_back({&e, &e.raw_domain});
  return PairwiseConflicts(items);
}

std::vector<std::string> FindPriorityCycle(const PriorityRelation& priorities) {
  enum class Mark { kNone, kActive, kDone };
  std::map<std::string, Mark> marks;
  std::vector<std::string> stack;
  std::vector<std::string> cycle;

  std::function<bool(const std::string&)> visit = [&](const std::string& id) {
    Mark& m = marks[id];
    if (m == Mark::kDone) return false;
    if (m == Mark::kActive) {
      auto it = std::find(stack.begin(), stack.end(), id);
      cycle.assign(it, stack.end());
      cycle.push_back(id);
      return true;
    }
    m = Mark::kActive;
    stack.push_back(id);
    if (auto it = priorities.before.find(id); it != priorities.before.end()) {
      for (const std::string& next : it->second) {
        if (visit(next)) return true;
      }
    }
    stack.pop_back();
    marks[id] = Mark::kDone;
    return false;
  };

  for (const auto& [id, unused] : priorities.before) {
    if (visit(id)) return cycle;
  }
  return {};
}

std::vector<const EffectiveElement*> EffectivePolicy::accept_elements() const {
  std::vector<const EffectiveElement*> out;
  for (const EffectiveElement& e : elements) {
    if (e.element.action == Action::kAccept) out.push_back(&e);
  }
  return out;
}

std::vector<const EffectiveElement*> EffectivePolicy::deny_elements() const {
  std::vector<const EffectiveElement*> out;
  for (const EffectiveElement& e : elements) {
    if (e.element.action == Action::kDeny) out.push_back(&e);
  }
  return out;
}

const EffectiveElement* EffectivePolicy::find(std::string_view id) const {
  for (const EffectiveElement& e : elements) {
    if (e.element.id == id) return &e;
  }
  return nullptr;
}

EffectivePolicy EffectiveDomains(std::span<const PolicyElement> elements,
                                 const PriorityRelation& priorities) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < elements.size(); ++i) index[elements[i].id] = i;

  std::vector<std::string> unknown;
  for (const auto& [id, before] : priorities.before) {
    if (!index.contains(id)) unknown.push_back(id);
    for (const std::string& b : before) {
      if (!index.contains(b)) unknown.push_back(b);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "priorities reference unknown elements:";
    for (const std::string& u : unknown) msg += " " + u;
    throw PolicyError(msg);
  }
  if (std::vector<std::string> cycle = FindPriorityCycle(priorities);
      !cycle.empty()) {
    std::string msg = "priority cycle:";
    for (size_t i = 0; i < cycle.size(); ++i) {
      msg += (i == 0 ? " " : " -> ") + cycle[i];
    }
    throw PolicyError(msg);
  }

  std::vector<std::optional<PacketSet>> memo(elements.size());
  std::function<const PacketSet&(size_t)> effective =
      [&](size_t i) -> const PacketSet& {
    if (memo[i]) return *memo[i];
    PacketSet dom = elements[i].raw_domain;
    if (auto it = priorities.before.find(elements[i].id);
        it != priorities.before.end()) {
      for (const std::string& b : it->second) {
        dom = Difference(dom, effective(index.at(b)));
      }
    }
    memo[i] = std::move(dom);
    return *memo[i];
  };

  EffectivePolicy policy;
  for (size_t i = 0; i < elements.size(); ++i) {
    policy.elements.push_back({elements[i], effective(i)});
  }
  return policy;
}

CoherenceReport CheckCoherence(const EffectivePolicy& policy) {
  std::vector<std::pair<const PolicyElement*, const PacketSet*>> items;
  for (const EffectiveElement& e : policy.elements) {
    items.push_back({&e.element, &e.effective_domain});
  }
  CoherenceReport report;
  report.conflicts = PairwiseConflicts(items);
  report.coherent = report.conflicts.empty();
  return report;
}

}  // namespace fwcheck
