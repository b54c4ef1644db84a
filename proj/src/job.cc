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

#include "fwcheck/job.h"

#include <fstream>
#include <sstream>

#include "fwcheck/errors.h"

namespace fwcheck {
namespace {

using nlohmann::json;

// Collects problems with the JSON location they were found at.
class Problems {
 public:
  void Add(const std::string& where, const std::string& message) {
    list_.push_back(where + ": " + message);
  }
  void Absorb(const std::string& where, const InputError& e) {
    for (const std::string& p : e.problems()) list_.push_back(where + ": " + p);
  }
  bool empty() const { return list_.empty(); }
  std::vector<std::string> take() { return std::move(list_); }

 private:
  std::vector<std::string> list_;
};

std::string At(const std::string& base, const std::string& key) {
  return base + "/" + key;
}
std::string At(const std::string& base, size_t index) {
  return base + "/" + std::to_string(index);
}

// A string field, with numbers accepted and rendered (ports are often
// written as numbers).
std::optional<std::string> Text(const json& obj, const std::string& key,
                                const std::string& where, Problems& problems,
                                bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) problems.Add(At(where, key), "missing field");
    return std::nullopt;
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_unsigned() || it->is_number_integer()) {
    return std::to_string(it->get<int64_t>());
  }
  problems.Add(At(where, key), "expected a string");
  return std::nullopt;
}

const json* Array(const json& obj, const std::string& key,
                  const std::string& where, Problems& problems,
                  bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) problems.Add(At(where, key), "missing field");
    return nullptr;
  }
  if (!it->is_array()) {
    problems.Add(At(where, key), "expected an array");
    return nullptr;
  }
  return &*it;
}

std::optional<std::string> StringItem(const json& item,
                                      const std::string& where,
                                      Problems& problems) {
  if (!item.is_string()) {
    problems.Add(where, "expected a string");
    return std::nullopt;
  }
  return item.get<std::string>();
}

template <typename F>
auto Guard(const std::string& where, Problems& problems, F&& f)
    -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const InputError& e) {
    problems.Absorb(where, e);
    return std::nullopt;
  }
}

struct ParsedFirewalls {
  FirewallTable table;
  std::vector<std::string> order;
  // Every id the document declares, including firewalls with errors.
  std::set<std::string> declared;
};

ParsedFirewalls ParseFirewalls(const json& topology, Problems& problems) {
  ParsedFirewalls out;
  const json* list = Array(topology, "firewalls", "topology", problems);
  if (!list) return out;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& fw = (*list)[i];
    const std::string where = At("topology/firewalls", i);
    if (!fw.is_object()) {
      problems.Add(where, "expected an object");
      continue;
    }
    std::optional<std::string> id = Text(fw, "id", where, problems);
    const std::string name = id.value_or("#" + std::to_string(i + 1));
    std::optional<Action> default_action;
    if (!fw.contains("default")) {
      problems.Add(where, "firewall " + name + " has no default action");
    } else if (auto text = Text(fw, "default", where, problems)) {
      default_action = ParseAction(*text);
      if (!default_action) {
        problems.Add(At(where, "default"), "unknown action '" + *text + "'");
      }
    }

    std::vector<FilteringRule> rules;
    bool rules_ok = true;
    if (const json* rule_list = Array(fw, "rules", where, problems)) {
      for (size_t r = 0; r < rule_list->size(); ++r) {
        const json& rule = (*rule_list)[r];
        const std::string rwhere = At(At(where, "rules"), r);
        if (!rule.is_object()) {
          problems.Add(rwhere, "expected an object");
          rules_ok = false;
          continue;
        }
        auto src = Text(rule, "src_adr", rwhere, problems);
        auto dst = Text(rule, "dst_adr", rwhere, problems);
        auto proto = Text(rule, "protocol", rwhere, problems);
        auto port = Text(rule, "dst_port", rwhere, problems);
        auto action_text = Text(rule, "action", rwhere, problems);
        std::optional<Action> action;
        if (action_text) {
          action = ParseAction(*action_text);
          if (!action) {
            problems.Add(
                At(rwhere, "action"),
                "unsupported action '" + *action_text + "' (accept or deny)");
          }
        }
        auto a = src ? Guard(At(rwhere, "src_adr"), problems,
                             [&] { return ParseAddressRange(*src, "src_adr"); })
                     : std::nullopt;
        auto b = dst ? Guard(At(rwhere, "dst_adr"), problems,
                             [&] { return ParseAddressRange(*dst, "dst_adr"); })
                     : std::nullopt;
        auto c =
            proto ? Guard(At(rwhere, "protocol"), problems,
                          [&] { return ParseProtocolSet(*proto, "protocol"); })
                  : std::nullopt;
        auto d = port ? Guard(At(rwhere, "dst_port"), problems,
                              [&] { return ParsePortRange(*port, "dst_port"); })
                      : std::nullopt;
        if (!a || !b || !c || !d || !action) {
          rules_ok = false;
          continue;
        }
        rules.push_back(
            {static_cast<int>(r) + 1, HeaderCube{*a, *b, *c, *d}, *action});
      }
    } else {
      rules_ok = false;
    }
    if (id && !out.declared.insert(*id).second) {
      problems.Add(where, "duplicate firewall id " + *id);
      continue;
    }
    if (!id || !default_action || !rules_ok) continue;
    out.table.emplace(*id,
                      FirewallConfig(*id, *default_action, std::move(rules)));
    out.order.push_back(*id);
  }
  return out;
}

std::vector<Zone> ParseZones(const json& topology, Problems& problems) {
  std::vector<Zone> zones;
  const json* list = Array(topology, "zones", "topology", problems);
  if (!list) return zones;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& z = (*list)[i];
    const std::string where = At("topology/zones", i);
    if (!z.is_object()) {
      problems.Add(where, "expected an object");
      continue;
    }
    Zone zone;
    auto id = Text(z, "id", where, problems);
    if (!id) continue;
    zone.id = *id;
    if (const json* addrs = Array(z, "addresses", where, problems)) {
      for (size_t k = 0; k < addrs->size(); ++k) {
        const std::string awhere = At(At(where, "addresses"), k);
        auto text = StringItem((*addrs)[k], awhere, problems);
        if (!text) continue;
        if (auto r = Guard(awhere, problems, [&] {
              return ParseAddressRange(*text, "address");
            })) {
          zone.addresses.push_back(*r);
        }
      }
    }
    if (z.contains("parent") && !z["parent"].is_null()) {
      zone.parent = Text(z, "parent", where, problems);
    }
    zones.push_back(std::move(zone));
  }
  return zones;
}

PathCatalog ParseCatalog(const json& topology, Problems& problems) {
  PathCatalog catalog;
  const json* list = Array(topology, "paths", "topology", problems);
  if (!list) return catalog;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& entry = (*list)[i];
    const std::string where = At("topology/paths", i);
    if (!entry.is_object()) {
      problems.Add(where, "expected an object");
      continue;
    }
    auto src = Text(entry, "src", where, problems);
    auto dst = Text(entry, "dst", where, problems);
    const json* seqs = Array(entry, "paths", where, problems);
    if (!src || !dst || !seqs) continue;
    std::vector<FirewallSequence> paths;
    for (size_t k = 0; k < seqs->size(); ++k) {
      const std::string pwhere = At(At(where, "paths"), k);
      if (!(*seqs)[k].is_array()) {
        problems.Add(pwhere, "expected an array of firewall ids");
        continue;
      }
      FirewallSequence seq;
      for (size_t n = 0; n < (*seqs)[k].size(); ++n) {
        if (auto fw = StringItem((*seqs)[k][n], At(pwhere, n), problems)) {
          seq.push_back(*fw);
        }
      }
      paths.push_back(std::move(seq));
    }
    if (!catalog.entries.emplace(std::make_pair(*src, *dst), std::move(paths))
             .second) {
      problems.Add(where, "duplicate path entry " + *src + " -> " + *dst);
    }
  }
  return catalog;
}

std::optional<AdjacencyGraph> ParseAdjacency(const json& topology,
                                             Problems& problems) {
  const json* list =
      Array(topology, "adjacency", "topology", problems, /*required=*/false);
  if (!list) return std::nullopt;
  AdjacencyGraph graph;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& edge = (*list)[i];
    const std::string where = At("topology/adjacency", i);
    if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() ||
        !edge[1].is_string()) {
      problems.Add(where, "expected a pair of node ids");
      continue;
    }
    graph.edges.emplace_back(edge[0].get<std::string>(),
                             edge[1].get<std::string>());
  }
  return graph;
}

// Resolves a directive endpoint: a zone id, or a zone plus an address set
// inside it.
std::optional<std::pair<std::string, AddressSet>> ParseEndpoint(
    const json& obj, const std::string& key, const std::string& where,
    const Topology& topology, Problems& problems) {
  const std::string ewhere = At(where, key);
  auto it = obj.find(key);
  if (it == obj.end()) {
    problems.Add(ewhere, "missing field");
    return std::nullopt;
  }
  std::string zone_id;
  std::optional<AddressSet> narrowed;
  if (it->is_string()) {
    zone_id = it->get<std::string>();
  } else if (it->is_object()) {
    auto z = Text(*it, "zone", ewhere, problems);
    if (!z) return std::nullopt;
    zone_id = *z;
    auto addr = it->find("address");
    if (addr == it->end()) {
      problems.Add(ewhere, "missing field address");
      return std::nullopt;
    }
    json items = addr->is_array() ? *addr : json::array({*addr});
    AddressSet set;
    for (size_t k = 0; k < items.size(); ++k) {
      const std::string awhere = At(At(ewhere, "address"), k);
      auto text = StringItem(items[k], awhere, problems);
      if (!text) return std::nullopt;
      auto r = Guard(awhere, problems,
                     [&] { return ParseAddressRange(*text, "address"); });
      if (!r) return std::nullopt;
      set.push_back(*r);
    }
    narrowed = NormalizeAddressSet(std::move(set));
  } else {
    problems.Add(ewhere, "expected a zone id or {zone, address}");
    return std::nullopt;
  }
  if (!topology.has_zone(zone_id)) {
    problems.Add(ewhere, "unknown zone " + zone_id);
    return std::nullopt;
  }
  const AddressSet& zone_addresses = topology.zone(zone_id).addresses;
  if (narrowed && !AddressSetContains(zone_addresses, *narrowed)) {
    problems.Add(ewhere, "address is not inside zone " + zone_id);
    return std::nullopt;
  }
  return std::make_pair(zone_id, narrowed.value_or(zone_addresses));
}

std::optional<TrafficPattern> ParsePattern(const json& obj,
                                           const std::string& where,
                                           const Topology& topology,
                                           Problems& problems) {
  auto src = ParseEndpoint(obj, "src", where, topology, problems);
  auto dst = ParseEndpoint(obj, "dst", where, topology, problems);
  auto proto = Text(obj, "protocol", where, problems);
  auto port = Text(obj, "port", where, problems);
  auto protocols =
      proto ? Guard(At(where, "protocol"), problems,
                    [&] { return ParseProtocolSet(*proto, "protocol"); })
            : std::nullopt;
  auto ports = port ? Guard(At(where, "port"), problems,
                            [&] { return ParsePortRange(*port, "port"); })
                    : std::nullopt;
  if (!src || !dst || !protocols || !ports) return std::nullopt;
  return TrafficPattern{src->first,  dst->first, src->second,
                        dst->second, *protocols, *ports};
}

std::vector<SecurityDirective> ParseDirectives(const json& policy,
                                               const Topology& topology,
                                               Problems& problems) {
  std::vector<SecurityDirective> out;
  const json* list = Array(policy, "directives", "policy", problems);
  if (!list) return out;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& d = (*list)[i];
    const std::string where = At("policy/directives", i);
    if (!d.is_object()) {
      problems.Add(where, "expected an object");
      continue;
    }
    SecurityDirective directive;
    auto id = Text(d, "id", where, problems);
    auto action_text = Text(d, "action", where, problems);
    std::optional<Action> action;
    if (action_text) {
      action = ParseAction(*action_text);
      if (!action) {
        problems.Add(At(where, "action"),
                     "unsupported action '" + *action_text + "'");
      }
    }
    auto condition = ParsePattern(d, where, topology, problems);
    bool ok = id && action && condition;
    if (const json* exceptions =
            Array(d, "exceptions", where, problems, /*required=*/false)) {
      for (size_t k = 0; k < exceptions->size(); ++k) {
        const json& e = (*exceptions)[k];
        const std::string ewhere = At(At(where, "exceptions"), k);
        if (!e.is_object()) {
          problems.Add(ewhere, "expected an object");
          ok = false;
          continue;
        }
        auto eid = Text(e, "id", ewhere, problems);
        auto pattern = ParsePattern(e, ewhere, topology, problems);
        if (!eid || !pattern) {
          ok = false;
          continue;
        }
        directive.exceptions.push_back({*eid, std::move(*pattern)});
      }
    }
    if (!ok) continue;
    directive.id = *id;
    directive.action = *action;
    directive.condition = std::move(*condition);
    out.push_back(std::move(directive));
  }
  return out;
}

PriorityRelation ParsePriorities(const json& doc, Problems& problems) {
  PriorityRelation relation;
  const json* list =
      doc.is_array() ? &doc : Array(doc, "priorities", "priorities", problems);
  if (!list) return relation;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& entry = (*list)[i];
    const std::string where = At("priorities", i);
    if (!entry.is_object()) {
      problems.Add(where, "expected an object");
      continue;
    }
    auto element = Text(entry, "element", where, problems);
    const json* before = Array(entry, "before", where, problems);
    if (!element || !before) continue;
    std::vector<std::string>& ids = relation.before[*element];
    for (size_t k = 0; k < before->size(); ++k) {
      if (auto id =
              StringItem((*before)[k], At(At(where, "before"), k), problems)) {
        ids.push_back(*id);
      }
    }
  }
  return relation;
}

json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string(), e.what());
  }
}

}  // namespace

std::vector<HeaderCube> VerificationJob::InputCubes() const {
  std::vector<HeaderCube> cubes;
  for (const auto& [id, fw] : firewalls) {
    for (const FilteringRule& r : fw.rules()) cubes.push_back(r.filter);
  }
  for (const auto& [id, zone] : topology.zones()) {
    for (const AddressRange& a : zone.addresses) {
      cubes.push_back(HeaderCube{a, a, ProtocolSet::All(), kAllPorts});
    }
  }
  for (const PolicyElement& e : elements) {
    cubes.insert(cubes.end(), e.raw_domain.cubes().begin(),
                 e.raw_domain.cubes().end());
  }
  return cubes;
}

VerificationJob ParseJob(const nlohmann::json& policy,
                         const nlohmann::json& topology,
                         const nlohmann::json* priorities) {
  Problems problems;
  if (!topology.is_object()) problems.Add("topology", "expected an object");
  if (!policy.is_object()) problems.Add("policy", "expected an object");
  if (!problems.empty()) throw InputError(problems.take());

  VerificationJob job;
  ParsedFirewalls firewalls = ParseFirewalls(topology, problems);
  job.firewalls = std::move(firewalls.table);
  job.firewall_order = std::move(firewalls.order);
  std::vector<Zone> zones = ParseZones(topology, problems);
  PathCatalog catalog = ParseCatalog(topology, problems);
  std::optional<AdjacencyGraph> adjacency = ParseAdjacency(topology, problems);

  bool topology_ok = true;
  try {
    job.topology = Topology(zones, std::move(catalog), firewalls.declared,
                            std::move(adjacency));
  } catch (const InputError& e) {
    problems.Absorb("topology", e);
    topology_ok = false;
    // Keep validating the policy against the zones alone.
    for (Zone& z : zones) z.parent.reset();
    try {
      job.topology = Topology(std::move(zones), {}, {});
    } catch (const InputError&) {
      throw InputError(problems.take());
    }
  }

  job.directives = ParseDirectives(policy, job.topology, problems);
  try {
    job.elements = ExtractElements(job.directives);
  } catch (const InputError& e) {
    problems.Absorb("policy", e);
  }

  if (priorities) {
    job.priorities = ParsePriorities(*priorities, problems);
    std::set<std::string> known;
    for (const PolicyElement& e : job.elements) known.insert(e.id);
    for (const auto& [id, before] : job.priorities.before) {
      if (!known.contains(id))
        problems.Add("priorities", "unknown element " + id);
      for (const std::string& b : before) {
        if (!known.contains(b))
          problems.Add("priorities", "unknown element " + b);
      }
    }
    std::vector<std::string> cycle = FindPriorityCycle(job.priorities);
    if (!cycle.empty()) {
      std::string msg = "priority cycle";
      for (size_t i = 0; i < cycle.size(); ++i) {
        msg += (i == 0 ? " " : " -> ") + cycle[i];
      }
      problems.Add("priorities", msg);
    }
  }

  for (const PolicyElement& e : job.elements) {
    if (!topology_ok) break;
    try {
      for (const FirewallSequence& path :
           job.topology.PathsFor(e.src_zone, e.dst_zone)) {
        for (const std::string& fw : path) {
          if (!firewalls.declared.contains(fw)) {
            problems.Add("directive " + e.source_directive,
                         "path names unknown firewall " + fw);
          }
        }
      }
    } catch (const InputError& err) {
      problems.Absorb(
          "directive " + e.source_directive + " (element " + e.id + ")", err);
    }
  }

  if (!problems.empty()) throw InputError(problems.take());
  return job;
}

VerificationJob LoadJob(const JobPaths& paths) {
  std::vector<std::string> problems;
  auto read =
      [&](const std::filesystem::path& p) -> std::optional<nlohmann::json> {
    try {
      return ReadJson(p);
    } catch (const InputError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
      return std::nullopt;
    }
  };
  auto policy = read(paths.policy);
  auto topology = read(paths.topology);
  std::optional<nlohmann::json> priorities;
  if (paths.priorities) priorities = read(*paths.priorities);
  if (!problems.empty()) throw InputError(std::move(problems));
  return ParseJob(*policy, *topology, priorities ? &*priorities : nullptr);
}

}  // namespace fwcheck
