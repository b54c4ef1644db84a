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

#include "fwcheck/oracle.h"

#include <algorithm>
#include <bit>

#include "fwcheck/errors.h"

namespace fwcheck {
namespace {

constexpr uint64_t kAddressEnd = uint64_t{1} << 32;
constexpr uint64_t kPortEnd = uint64_t{1} << 16;

int WidthFor(size_t pieces) {
  return std::max(1, static_cast<int>(std::bit_width(pieces - 1)));
}

// Index of the piece starting at `value`.
std::optional<size_t> PieceStarting(const std::vector<uint64_t>& bounds,
                                    uint64_t value) {
  auto it = std::lower_bound(bounds.begin(), bounds.end(), value);
  if (it == bounds.end() || *it != value) return std::nullopt;
  return static_cast<size_t>(it - bounds.begin());
}

void CheckEnumerable(const UniverseSpec& universe) {
  std::optional<uint64_t> size = universe.size();
  if (!size || *size > kMaxEnumerablePoints) {
    throw InputError("oracle",
                     "universe too large to enumerate; use a smaller model");
  }
}

}  // namespace

DownscaledModel DownscaledModel::Compress(std::span<const HeaderCube> cubes) {
  DownscaledModel model;
  const std::array<uint64_t, 3> ends = {kAddressEnd, kAddressEnd, kPortEnd};
  for (int d = 0; d < 3; ++d) model.bounds_[d] = {0, ends[d]};
  for (const HeaderCube& c : cubes) {
    model.bounds_[0].insert(model.bounds_[0].end(),
                            {uint64_t{c.src.lo}, uint64_t{c.src.hi} + 1});
    model.bounds_[1].insert(model.bounds_[1].end(),
                            {uint64_t{c.dst.lo}, uint64_t{c.dst.hi} + 1});
    model.bounds_[2].insert(model.bounds_[2].end(),
                            {uint64_t{c.ports.lo}, uint64_t{c.ports.hi} + 1});
  }
  for (auto& b : model.bounds_) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  model.universe_ = UniverseSpec{
      WidthFor(model.bounds_[0].size() - 1),
      WidthFor(model.bounds_[1].size() - 1),
      ProtocolSet::All(),
      WidthFor(model.bounds_[2].size() - 1),
  };
  CheckEnumerable(model.universe_);
  return model;
}

DownscaledModel DownscaledModel::Identity(const UniverseSpec& universe) {
  DownscaledModel model;
  model.universe_ = universe;
  model.identity_ = true;
  return model;
}

HeaderCube DownscaledModel::MapCube(const HeaderCube& cube) const {
  if (identity_) return cube;
  const HeaderCube full = universe_.full_cube();
  const std::array<uint64_t, 3> maxima = {full.src.hi, full.dst.hi,
                                          full.ports.hi};
  auto map = [&](int d, uint64_t lo,
                 uint64_t hi) -> std::pair<uint64_t, uint64_t> {
    const std::vector<uint64_t>& b = bounds_[d];
    auto first = PieceStarting(b, lo);
    auto past = PieceStarting(b, hi + 1);
    if (!first || !past) {
      throw InputError("oracle", "cube " + FormatCube(cube) +
                                     " is not aligned with the model");
    }
    const size_t pieces = b.size() - 1;
    uint64_t mapped_hi = *past == pieces ? maxima[d] : *past - 1;
    return {*first, mapped_hi};
  };
  auto [slo, shi] = map(0, cube.src.lo, cube.src.hi);
  auto [dlo, dhi] = map(1, cube.dst.lo, cube.dst.hi);
  auto [plo, phi] = map(2, cube.ports.lo, cube.ports.hi);
  return HeaderCube{
      {static_cast<uint32_t>(slo), static_cast<uint32_t>(shi)},
      {static_cast<uint32_t>(dlo), static_cast<uint32_t>(dhi)},
      cube.protocols & universe_.protocols,
      {static_cast<uint16_t>(plo), static_cast<uint16_t>(phi)},
  };
}

PacketSet DownscaledModel::MapSet(const PacketSet& set) const {
  std::vector<HeaderCube> cubes;
  for (const HeaderCube& c : set.cubes()) cubes.push_back(MapCube(c));
  return PacketSet::FromCubes(cubes);
}

FirewallConfig DownscaledModel::MapFirewall(
    const FirewallConfig& firewall) const {
  std::vector<FilteringRule> rules;
  for (const FilteringRule& r : firewall.rules()) {
    rules.push_back({r.order, MapCube(r.filter), r.action});
  }
  return FirewallConfig(firewall.id(), firewall.default_action(),
                        std::move(rules));
}

HeaderPoint DownscaledModel::Lift(const HeaderPoint& point) const {
  if (identity_) return point;
  auto lift = [&](int d, uint64_t v) {
    const size_t pieces = bounds_[d].size() - 1;
    return bounds_[d][std::min<uint64_t>(v, pieces - 1)];
  };
  return {static_cast<uint32_t>(lift(0, point.src_ip)),
          static_cast<uint32_t>(lift(1, point.dst_ip)), point.protocol,
          static_cast<uint16_t>(lift(2, point.dst_port))};
}

void ForEachPoint(const UniverseSpec& universe,
                  const std::function<void(const HeaderPoint&)>& fn) {
  const HeaderCube full = universe.full_cube();
  HeaderPoint p;
  for (uint64_t s = full.src.lo; s <= full.src.hi; ++s) {
    p.src_ip = static_cast<uint32_t>(s);
    for (uint64_t d = full.dst.lo; d <= full.dst.hi; ++d) {
      p.dst_ip = static_cast<uint32_t>(d);
      for (Protocol proto : kAllProtocols) {
        if (!full.protocols.contains(proto)) continue;
        p.protocol = proto;
        for (uint64_t port = full.ports.lo; port <= full.ports.hi; ++port) {
          p.dst_port = static_cast<uint16_t>(port);
          fn(p);
        }
      }
    }
  }
}

PathOutcome SimulatePath(const FirewallPath& path, const HeaderPoint& packet) {
  for (size_t n = 0; n < path.size(); ++n) {
    if (FirstMatchAction(path[n], packet) == Action::kDeny) {
      return {false, static_cast<int>(n) + 1};
    }
  }
  return {};
}

OracleResult OracleCheckPositive(const PacketSet& domain,
                                 std::span<const FirewallPath> paths,
                                 const UniverseSpec& universe) {
  CheckEnumerable(universe);
  OracleResult result;
  ForEachPoint(universe, [&](const HeaderPoint& p) {
    if (!result.holds || !Member(p, domain)) return;
    for (size_t i = 0; i < paths.size() && result.holds; ++i) {
      for (size_t n = 0; n < paths[i].size(); ++n) {
        if (FirstMatchAction(paths[i][n], p) != Action::kAccept) {
          result.holds = false;
          result.counterexample = OracleCounterexample{
              p, static_cast<int>(i) + 1, static_cast<int>(n) + 1};
          break;
        }
      }
    }
  });
  return result;
}

OracleResult OracleCheckRestrictive(const PacketSet& domain,
                                    std::span<const FirewallPath> paths,
                                    const UniverseSpec& universe) {
  CheckEnumerable(universe);
  OracleResult result;
  ForEachPoint(universe, [&](const HeaderPoint& p) {
    if (!result.holds || !Member(p, domain)) return;
    for (size_t i = 0; i < paths.size(); ++i) {
      if (SimulatePath(paths[i], p).accepted) {
        result.holds = false;
        result.counterexample =
            OracleCounterexample{p, static_cast<int>(i) + 1, 0};
        break;
      }
    }
  });
  return result;
}

}  // namespace fwcheck
