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

#include "fwcheck/firewall_model.h"

#include <stdexcept>
#include <utility>

#include "fwcheck/errors.h"

namespace fwcheck {
namespace {

// Union of effective domains of the rules carrying `action`.
PacketSet EffectiveUnion(const FirewallConfig& f, Action action) {
  std::vector<HeaderCube> cubes;
  PacketSet seen;
  for (const FilteringRule& r : f.rules()) {
    PacketSet dom(r.filter);
    if (r.action == action) {
      PacketSet effective = Difference(dom, seen);
      cubes.insert(cubes.end(), effective.cubes().begin(),
                   effective.cubes().end());
    }
    seen = Union(seen, dom);
  }
  // Effective domains are pairwise disjoint.
  return Canonical(std::move(cubes));
}

}  // namespace

std::string_view ActionName(Action action) {
  return action == Action::kAccept ? "accept" : "deny";
}

std::optional<Action> ParseAction(std::string_view name) {
  if (name == "accept") return Action::kAccept;
  if (name == "deny") return Action::kDeny;
  return std::nullopt;
}

FirewallConfig::FirewallConfig(std::string id, Action default_action,
                               std::vector<FilteringRule> rules)
    : id_(std::move(id)),
      default_action_(default_action),
      rules_(std::move(rules)) {
  for (size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].order != static_cast<int>(i) + 1) {
      throw InputError("firewall " + id_,
                       "rule at position " + std::to_string(i + 1) +
                           " has order " + std::to_string(rules_[i].order));
    }
    if (!rules_[i].filter.valid()) {
      throw InputError("firewall " + id_, "rule " + std::to_string(i + 1) +
                                              " has an empty filter");
    }
  }
}

PacketSet EffectiveDomain(const FirewallConfig& f, int order) {
  if (order < 1 || order > static_cast<int>(f.rules().size())) {
    throw std::out_of_range("firewall " + f.id() + " has no rule " +
                            std::to_string(order));
  }
  std::vector<HeaderCube> earlier;
  for (int j = 1; j < order; ++j) earlier.push_back(f.rule(j).filter);
  return Difference(PacketSet(f.rule(order).filter),
                    PacketSet::FromCubes(earlier));
}

std::vector<PacketSet> EffectiveDomains(const FirewallConfig& f) {
  std::vector<PacketSet> out;
  out.reserve(f.rules().size());
  PacketSet seen;
  for (const FilteringRule& r : f.rules()) {
    PacketSet dom(r.filter);
    out.push_back(Difference(dom, seen));
    seen = Union(seen, dom);
  }
  return out;
}

std::optional<int> FirstMatchRule(const FirewallConfig& f,
                                  const HeaderPoint& p) {
  for (const FilteringRule& r : f.rules()) {
    if (r.filter.contains(p)) return r.order;
  }
  return std::nullopt;
}

Action FirstMatchAction(const FirewallConfig& f, const HeaderPoint& p) {
  if (auto order = FirstMatchRule(f, p)) return f.rule(*order).action;
  return f.default_action();
}

PacketSet AcceptedSet(const FirewallConfig& f, const UniverseSpec& u) {
  if (f.default_action() == Action::kDeny) {
    return Intersect(EffectiveUnion(f, Action::kAccept),
                     PacketSet::Universe(u));
  }
  return Difference(PacketSet::Universe(u), EffectiveUnion(f, Action::kDeny));
}

PacketSet DeniedSet(const FirewallConfig& f, const UniverseSpec& u) {
  if (f.default_action() == Action::kAccept) {
    return Intersect(EffectiveUnion(f, Action::kDeny), PacketSet::Universe(u));
  }
  return Difference(PacketSet::Universe(u), EffectiveUnion(f, Action::kAccept));
}

std::vector<int> ShadowedRules(const FirewallConfig& f) {
  std::vector<int> out;
  std::vector<PacketSet> effective = EffectiveDomains(f);
  for (size_t i = 0; i < effective.size(); ++i) {
    if (IsEmpty(effective[i])) out.push_back(static_cast<int>(i) + 1);
  }
  return out;
}

}  // namespace fwcheck
