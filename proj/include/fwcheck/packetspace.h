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

// Exact set algebra over packet headers.
//
// A header is a point in src_ip x dst_ip x protocol x dst_port. A PacketSet
// is a finite union of pairwise-disjoint boxes ("cubes") in that space, kept
// in a canonical form: two PacketSets hold the same points iff their cube
// vectors compare equal. Every operation below returns canonical sets.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fwcheck {

enum class Protocol : uint8_t { kTcp = 0, kUdp = 1, kIcmp = 2 };

inline constexpr std::array<Protocol, 3> kAllProtocols = {
    Protocol::kTcp, Protocol::kUdp, Protocol::kIcmp};

std::string_view ProtocolName(Protocol protocol);
std::optional<Protocol> ParseProtocol(std::string_view name);

// Nonempty subsets of {tcp, udp, icmp}; empty is representable but never
// appears in a valid cube.
class ProtocolSet {
 public:
  constexpr ProtocolSet() = default;

  static constexpr ProtocolSet All() { return ProtocolSet(0b111); }
  static constexpr ProtocolSet Of(Protocol p) {
    return ProtocolSet(static_cast<uint8_t>(1u << static_cast<unsigned>(p)));
  }
  static constexpr ProtocolSet FromBits(uint8_t bits) {
    return ProtocolSet(bits & 0b111);
  }

  constexpr bool contains(Protocol p) const {
    return (bits_ >> static_cast<unsigned>(p)) & 1u;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const {
    return ((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1);
  }
  constexpr uint8_t bits() const { return bits_; }
  std::optional<Protocol> lowest() const;

  friend constexpr ProtocolSet operator&(ProtocolSet a, ProtocolSet b) {
    return ProtocolSet(a.bits_ & b.bits_);
  }
  friend constexpr ProtocolSet operator|(ProtocolSet a, ProtocolSet b) {
    return ProtocolSet(a.bits_ | b.bits_);
  }
  friend constexpr ProtocolSet operator-(ProtocolSet a, ProtocolSet b) {
    return ProtocolSet(a.bits_ & ~b.bits_ & 0b111);
  }
  friend constexpr auto operator<=>(ProtocolSet, ProtocolSet) = default;

 private:
  explicit constexpr ProtocolSet(uint8_t bits) : bits_(bits) {}
  uint8_t bits_ = 0;
};

// Closed interval [lo, hi].
template <typename T>
struct Interval {
  T lo{};
  T hi{};

  constexpr bool valid() const { return lo <= hi; }
  constexpr bool contains(T v) const { return lo <= v && v <= hi; }
  constexpr bool contains(const Interval& o) const {
    return lo <= o.lo && o.hi <= hi;
  }
  constexpr bool overlaps(const Interval& o) const {
    return lo <= o.hi && o.lo <= hi;
  }
  constexpr uint64_t size() const { return uint64_t{hi} - uint64_t{lo} + 1; }

  friend constexpr auto operator<=>(const Interval&, const Interval&) = default;
};

using AddressRange = Interval<uint32_t>;
using PortRange = Interval<uint16_t>;

inline constexpr AddressRange kAllAddresses{0, 0xffffffffu};
inline constexpr PortRange kAllPorts{0, 0xffff};

struct HeaderPoint {
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  Protocol protocol = Protocol::kTcp;
  uint16_t dst_port = 0;

  // Lexicographic on (src, dst, protocol, port) with tcp < udp < icmp.
  friend constexpr auto operator<=>(const HeaderPoint&,
                                    const HeaderPoint&) = default;
};

struct HeaderCube {
  AddressRange src = kAllAddresses;
  AddressRange dst = kAllAddresses;
  ProtocolSet protocols = ProtocolSet::All();
  PortRange ports = kAllPorts;

  bool valid() const {
    return src.valid() && dst.valid() && !protocols.empty() && ports.valid();
  }
  bool contains(const HeaderPoint& p) const;
  bool contains(const HeaderCube& other) const;
  bool overlaps(const HeaderCube& other) const;
  std::optional<HeaderCube> intersection(const HeaderCube& other) const;
  // Lexicographically smallest point of the cube.
  HeaderPoint min_point() const;

  friend constexpr auto operator<=>(const HeaderCube&,
                                    const HeaderCube&) = default;
};

// Bounded packet universe. The full IPv4 universe is Ipv4(); the oracle
// uses small ones so every point can be enumerated.
struct UniverseSpec {
  int src_bits = 32;
  int dst_bits = 32;
  ProtocolSet protocols = ProtocolSet::All();
  int port_bits = 16;

  static UniverseSpec Ipv4() { return {}; }

  HeaderCube full_cube() const;
  bool contains(const HeaderCube& cube) const;
  // Number of points, or nullopt when it does not fit in 64 bits.
  std::optional<uint64_t> size() const;
};

class PacketSet {
 public:
  PacketSet() = default;
  // Throws std::invalid_argument for an invalid cube.
  explicit PacketSet(const HeaderCube& cube);

  // Union of arbitrary (possibly overlapping) cubes.
  static PacketSet FromCubes(std::span<const HeaderCube> cubes);
  static PacketSet Universe(const UniverseSpec& u = UniverseSpec::Ipv4());

  const std::vector<HeaderCube>& cubes() const { return cubes_; }
  bool empty() const { return cubes_.empty(); }

  friend bool operator==(const PacketSet&, const PacketSet&) = default;

 private:
  friend PacketSet Canonical(std::vector<HeaderCube> disjoint);
  std::vector<HeaderCube> cubes_;
};

// Builds the canonical set from pairwise-disjoint cubes. Overlapping input
// is undefined; use PacketSet::FromCubes for that.
PacketSet Canonical(std::vector<HeaderCube> disjoint);

PacketSet Union(const PacketSet& a, const PacketSet& b);
PacketSet Intersect(const PacketSet& a, const PacketSet& b);
PacketSet Difference(const PacketSet& a, const PacketSet& b);
bool IsEmpty(const PacketSet& a);
bool IsSubset(const PacketSet& a, const PacketSet& b);
bool Member(const HeaderPoint& p, const PacketSet& a);
std::optional<HeaderPoint> Witness(const PacketSet& a);
// Throws InputError when a cube lies outside `u` or the count overflows.
uint64_t Cardinality(const PacketSet& a, const UniverseSpec& u);

inline PacketSet operator|(const PacketSet& a, const PacketSet& b) {
  return Union(a, b);
}
inline PacketSet operator&(const PacketSet& a, const PacketSet& b) {
  return Intersect(a, b);
}
inline PacketSet operator-(const PacketSet& a, const PacketSet& b) {
  return Difference(a, b);
}

// Sorted, merged list of address intervals. Zones and directive endpoints
// use this for the single address dimension they constrain.
using AddressSet = std::vector<AddressRange>;
AddressSet NormalizeAddressSet(AddressSet ranges);
bool AddressSetContains(const AddressSet& outer, const AddressSet& inner);

// --- Header syntax -------------------------------------------------------
//
// Addresses: `*`, `a.b.c.d`, `a.b.c.d/m`, or `a.b.c.d-e.f.g.h`.
// Ports: `*`, `n`, or `n-m`. Protocols: `tcp`, `udp`, `icmp`, or `*`.
// Failures throw InputError naming `field`.

AddressRange ParseAddressRange(std::string_view text, std::string_view field);
PortRange ParsePortRange(std::string_view text, std::string_view field);
ProtocolSet ParseProtocolSet(std::string_view text, std::string_view field);

HeaderCube CubeOf(std::string_view src, std::string_view dst,
                  std::string_view protocol, std::string_view port);

std::string FormatAddress(uint32_t address);
std::string FormatAddressRange(const AddressRange& range);
std::string FormatPortRange(const PortRange& range);
std::string FormatProtocolSet(ProtocolSet protocols);
std::string FormatPoint(const HeaderPoint& p);
std::string FormatCube(const HeaderCube& cube);

}  // namespace fwcheck
