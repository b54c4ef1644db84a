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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwcheck/packetspace.h"

namespace fwcheck {

enum class Action : uint8_t { kAccept, kDeny };

std::string_view ActionName(Action action);
std::optional<Action> ParseAction(std::string_view name);
inline Action Opposite(Action a) {
  return a == Action::kAccept ? Action::kDeny : Action::kAccept;
}

struct FilteringRule {
  int order = 0;  // 1-based position in the configuration
  HeaderCube filter;
  Action action = Action::kDeny;

  friend bool operator==(const FilteringRule&, const FilteringRule&) = default;
};

// Ordered rule list with first-match semantics and an explicit default
// action for packets no rule matches.
class FirewallConfig {
 public:
  // Throws InputError unless rule orders are exactly 1..m in sequence.
  FirewallConfig(std::string id, Action default_action,
                 std::vector<FilteringRule> rules);

  const std::string& id() const { return id_; }
  Action default_action() const { return default_action_; }
  const std::vector<FilteringRule>& rules() const { return rules_; }
  const FilteringRule& rule(int order) const { return rules_.at(order - 1); }

  friend bool operator==(const FirewallConfig&,
                         const FirewallConfig&) = default;

 private:
  std::string id_;
  Action default_action_;
  std::vector<FilteringRule> rules_;
};

// Packets for which rule `order` is the first match: its filter minus every
// earlier filter. Throws std::out_of_range for a bad index.
PacketSet EffectiveDomain(const FirewallConfig& f, int order);

// Effective domains of every rule, in rule order.
std::vector<PacketSet> EffectiveDomains(const FirewallConfig& f);

// Order of the first matching rule, or nullopt when the default applies.
std::optional<int> FirstMatchRule(const FirewallConfig& f,
                                  const HeaderPoint& p);
Action FirstMatchAction(const FirewallConfig& f, const HeaderPoint& p);

PacketSet AcceptedSet(const FirewallConfig& f,
                      const UniverseSpec& u = UniverseSpec::Ipv4());
PacketSet DeniedSet(const FirewallConfig& f,
                    const UniverseSpec& u = UniverseSpec::Ipv4());

// Rules whose effective domain is empty.
std::vector<int> ShadowedRules(const FirewallConfig& f);

}  // namespace fwcheck
