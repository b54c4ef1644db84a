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

// Brute-force reference checker. Packets are enumerated one by one and
// pushed through the firewalls with first-match simulation; no set algebra
// is involved beyond point membership.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fwcheck/conformance_engine.h"
#include "fwcheck/firewall_model.h"
#include "fwcheck/packetspace.h"

namespace fwcheck {

// Largest universe the oracle agrees to enumerate.
inline constexpr uint64_t kMaxEnumerablePoints = uint64_t{1} << 20;

// Small universe standing in for the IPv4 one.
//
// Each interval dimension is cut at every boundary of a given set of cubes;
// each elementary piece becomes one value of the small universe (the last
// piece also absorbs any unused values up to the power-of-two width). Every
// set built from those cubes with union, intersection, and difference is a
// union of pieces, so membership is preserved exactly. Protocols are kept.
class DownscaledModel {
 public:
  // Throws InputError when the compressed universe would exceed
  // kMaxEnumerablePoints.
  static DownscaledModel Compress(std::span<const HeaderCube> cubes);
  // The identity map on an already small universe.
  static DownscaledModel Identity(const UniverseSpec& universe);

  const UniverseSpec& universe() const { return universe_; }

  // Throws InputError when a cube boundary is not one the model was built
  // from.
  HeaderCube MapCube(const HeaderCube& cube) const;
  PacketSet MapSet(const PacketSet& set) const;
  FirewallConfig MapFirewall(const FirewallConfig& firewall) const;
  // Representative full-scale packet of a small-universe point.
  HeaderPoint Lift(const HeaderPoint& point) const;

 private:
  UniverseSpec universe_;
  bool identity_ = false;
  // Per interval dimension (src, dst, port): sorted boundaries, starting at
  // 0 and ending one past the field maximum.
  std::array<std::vector<uint64_t>, 3> bounds_;
};

// Calls `fn` on every point of the universe in lexicographic order.
void ForEachPoint(const UniverseSpec& universe,
                  const std::function<void(const HeaderPoint&)>& fn);

struct PathOutcome {
  bool accepted = true;
  int denied_at = 0;  // 1-based firewall position when denied
};

PathOutcome SimulatePath(const FirewallPath& path, const HeaderPoint& packet);

struct OracleCounterexample {
  HeaderPoint packet;
  int path_index = 0;      // 1-based
  int firewall_index = 0;  // 1-based; 0 for restrictive counterexamples
};

struct OracleResult {
  bool holds = true;
  // The lexicographically smallest failing packet.
  std::optional<OracleCounterexample> counterexample;
};

// Every packet of `domain` is accepted by every firewall of every path.
// Throws InputError when the universe is too large to enumerate.
OracleResult OracleCheckPositive(const PacketSet& domain,
                                 std::span<const FirewallPath> paths,
                                 const UniverseSpec& universe);

// Every packet of `domain` is denied somewhere along every path.
OracleResult OracleCheckRestrictive(const PacketSet& domain,
                                    std::span<const FirewallPath> paths,
                                    const UniverseSpec& universe);

}  // namespace fwcheck
