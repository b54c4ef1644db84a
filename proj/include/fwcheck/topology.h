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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fwcheck/packetspace.h"

namespace fwcheck {

struct Zone {
  std::string id;
  AddressSet addresses;
  std::optional<std::string> parent;
};

// Ordered firewall ids a flow crosses.
using FirewallSequence = std::vector<std::string>;

struct PathCatalog {
  std::map<std::pair<std::string, std::string>, std::vector<FirewallSequence>>
      entries;
};

// Undirected links between zones and firewalls. Paths may only pass through
// firewall nodes; zones are endpoints.
struct AdjacencyGraph {
  std::set<std::string> firewalls;
  std::vector<std::pair<std::string, std::string>> edges;
};

inline constexpr size_t kDefaultPathCap = 64;

// All simple paths from `src_zone` to `dst_zone`, as firewall sequences in
// lexicographic order. Throws InputError when there are more than `cap`.
std::vector<FirewallSequence> EnumeratePaths(const AdjacencyGraph& graph,
                                             const std::string& src_zone,
                                             const std::string& dst_zone,
                                             size_t cap = kDefaultPathCap);

class Topology {
 public:
  Topology() = default;
  // Throws InputError when a parent is unknown, a sub-zone escapes its
  // parent, the parent chain loops, or a catalog path names an unknown
  // firewall.
  Topology(std::vector<Zone> zones, PathCatalog catalog,
           std::set<std::string> firewall_ids,
           std::optional<AdjacencyGraph> adjacency = std::nullopt);

  const std::map<std::string, Zone>& zones() const { return zones_; }
  const Zone& zone(const std::string& id) const;
  bool has_zone(const std::string& id) const { return zones_.contains(id); }
  const PathCatalog& catalog() const { return catalog_; }
  const std::optional<AdjacencyGraph>& adjacency() const { return adjacency_; }

  // `id`, its parent, its grandparent, ...
  std::vector<std::string> AncestorChain(const std::string& id) const;

  // Declared paths for the pair. Falls back through the parent chains (source
  // outer, destination inner); at each candidate pair an explicit catalog
  // entry wins over paths derived from the adjacency graph. Throws
  // InputError when nothing resolves.
  std::vector<FirewallSequence> PathsFor(const std::string& src_zone,
                                         const std::string& dst_zone) const;

 private:
  std::map<std::string, Zone> zones_;
  PathCatalog catalog_;
  std::optional<AdjacencyGraph> adjacency_;
};

}  // namespace fwcheck
