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

#include "fwcheck/topology.h"

#include <algorithm>
#include <functional>

#include "fwcheck/errors.h"

namespace fwcheck {

std::vector<FirewallSequence> EnumeratePaths(const AdjacencyGraph& graph,
                                             const std::string& src_zone,
                                             const std::string& dst_zone,
                                             size_t cap) {
  std::map<std::string, std::set<std::string>> neighbors;
  for (const auto& [a, b] : graph.edges) {
    neighbors[a].insert(b);
    neighbors[b].insert(a);
  }

  std::vector<FirewallSequence> out;
  FirewallSequence current;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> extend = [&](const std::string& at) {
    for (const std::string& next : neighbors[at]) {
      if (next == dst_zone && !current.empty()) {
        out.push_back(current);
        if (out.size() > cap) {
          throw InputError(
              "paths " + src_zone + " -> " + dst_zone,
              "more than " + std::to_string(cap) +
                  " simple paths; declare the path catalog explicitly");
        }
      }
      if (!graph.firewalls.contains(next) || on_path.contains(next)) continue;
      current.push_back(next);
      on_path.insert(next);
      extend(next);
      on_path.erase(next);
      current.pop_back();
    }
  };
  extend(src_zone);
  std::sort(out.begin(), out.end());
  return out;
}

Topology::Topology(std::vector<Zone> zones, PathCatalog catalog,
                   std::set<std::string> firewall_ids,
                   std::optional<AdjacencyGraph> adjacency)
    : catalog_(std::move(catalog)), adjacency_(std::move(adjacency)) {
  std::vector<std::string> problems;
  for (Zone& z : zones) {
    z.addresses = NormalizeAddressSet(std::move(z.addresses));
    if (z.addresses.empty())
      problems.push_back("zone " + z.id + ": no addresses");
    std::string id = z.id;
    if (!zones_.emplace(id, std::move(z)).second) {
      problems.push_back("zone " + id + ": duplicate id");
    }
  }
  for (const auto& [id, z] : zones_) {
    if (!z.parent) continue;
    auto parent = zones_.find(*z.parent);
    if (parent == zones_.end()) {
      problems.push_back("zone " + id + ": unknown parent " + *z.parent);
      continue;
    }
    if (!AddressSetContains(parent->second.addresses, z.addresses)) {
      problems.push_back("zone " + id + ": addresses are not inside parent " +
                         *z.parent);
    }
    std::set<std::string> seen{id};
    for (const Zone* walk = &z; walk->parent;) {
      auto it = zones_.find(*walk->parent);
      if (it == zones_.end()) break;
      if (!seen.insert(it->first).second) {
        problems.push_back("zone " + id + ": parent chain loops");
        break;
      }
      walk = &it->second;
    }
  }
  for (const auto& [pair, paths] : catalog_.entries) {
    const std::string label = "paths " + pair.first + " -> " + pair.second;
    if (!zones_.contains(pair.first)) {
      problems.push_back(label + ": unknown zone " + pair.first);
    }
    if (!zones_.contains(pair.second)) {
      problems.push_back(label + ": unknown zone " + pair.second);
    }
    for (const FirewallSequence& path : paths) {
      for (const std::string& fw : path) {
        if (!firewall_ids.contains(fw)) {
          problems.push_back(label + ": unknown firewall " + fw);
        }
      }
    }
  }
  if (adjacency_) {
    for (const auto& [a, b] : adjacency_->edges) {
      for (const std::string& node : {a, b}) {
        if (!zones_.contains(node) && !firewall_ids.contains(node)) {
          problems.push_back("adjacency: unknown node " + node);
        }
      }
    }
    adjacency_->firewalls = std::move(firewall_ids);
  }
  if (!problems.empty()) throw InputError(std::move(problems));
}

const Zone& Topology::zone(const std::string& id) const {
  auto it = zones_.find(id);
  if (it == zones_.end()) throw InputError("zone", "unknown zone " + id);
  return it->second;
}

std::vector<std::string> Topology::AncestorChain(const std::string& id) const {
  std::vector<std::string> chain;
  std::optional<std::string> at = id;
  while (at && zones_.contains(*at) &&
         std::find(chain.begin(), chain.end(), *at) == chain.end()) {
    chain.push_back(*at);
    at = zones_.at(*at).parent;
  }
  return chain;
}

std::vector<FirewallSequence> Topology::PathsFor(
    const std::string& src_zone, const std::string& dst_zone) const {
  for (const std::string& s : AncestorChain(src_zone)) {
    for (const std::string& d : AncestorChain(dst_zone)) {
      if (auto it = catalog_.entries.find({s, d});
          it != catalog_.entries.end()) {
        return it->second;
      }
      if (adjacency_) {
        std::vector<FirewallSequence> derived =
            EnumeratePaths(*adjacency_, s, d);
        if (!derived.empty()) return derived;
      }
    }
  }
  throw InputError("paths " + src_zone + " -> " + dst_zone,
                   "no path catalog entry for the pair or any ancestor pair");
}

}  // namespace fwcheck
