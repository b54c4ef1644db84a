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

#include "fwcheck/packetspace.h"

#include <algorithm>
#include <charconv>
#include <limits>
#include <stdexcept>
#include <utility>

#include "fwcheck/errors.h"

namespace fwcheck {
namespace {

// Dimension order used for splitting and canonicalization.
enum Dim { kSrc = 0, kDst = 1, kProto = 2, kPort = 3 };

// Inclusive span widened to 64 bits so `hi + 1` never wraps.
struct Span {
  uint64_t lo;
  uint64_t hi;
};

Span GetSpan(const HeaderCube& c, int dim) {
  switch (dim) {
    case kSrc:
      return {c.src.lo, c.src.hi};
    case kDst:
      return {c.dst.lo, c.dst.hi};
    default:
      return {c.ports.lo, c.ports.hi};
  }
}

void SetSpan(HeaderCube& c, int dim, uint64_t lo, uint64_t hi) {
  switch (dim) {
    case kSrc:
      c.src = {static_cast<uint32_t>(lo), static_cast<uint32_t>(hi)};
      break;
    case kDst:
      c.dst = {static_cast<uint32_t>(lo), static_cast<uint32_t>(hi)};
      break;
    default:
      c.ports = {static_cast<uint16_t>(lo), static_cast<uint16_t>(hi)};
      break;
  }
}

// All dimensions zeroed; placeholder for "the rest of the cube" while a
// canonical form is assembled one dimension at a time.
HeaderCube ZeroCube() {
  return HeaderCube{{0, 0}, {0, 0}, ProtocolSet(), {0, 0}};
}

// Canonical form of disjoint cubes restricted to dimensions >= dim. The
// returned cubes have every dimension below `dim` zeroed so that slices can
// be compared with ==.
//
// Interval dimensions are cut at every cube boundary; adjacent elementary
// intervals whose (canonical) cross-sections are equal are merged. The
// protocol dimension groups protocols with equal cross-sections. The result
// depends only on the point set.
std::vector<HeaderCube> CanonicalFrom(const std::vector<HeaderCube>& cubes,
                                      int dim) {
  std::vector<HeaderCube> out;
  if (cubes.empty()) return out;

  if (dim == kProto) {
    std::array<std::vector<HeaderCube>, 3> slices;
    for (Protocol p : kAllProtocols) {
      std::vector<HeaderCube> sub;
      for (const HeaderCube& c : cubes) {
        if (c.protocols.contains(p)) sub.push_back(c);
      }
      slices[static_cast<int>(p)] = CanonicalFrom(sub, kPort);
    }
    uint8_t grouped = 0;
    for (int p = 0; p < 3; ++p) {
      if (slices[p].empty() || ((grouped >> p) & 1)) continue;
      uint8_t mask = static_cast<uint8_t>(1u << p);
      for (int q = p + 1; q < 3; ++q) {
        if (!((grouped >> q) & 1) && slices[q] == slices[p]) {
          mask |= static_cast<uint8_t>(1u << q);
        }
      }
      grouped |= mask;
      for (HeaderCube c : slices[p]) {
        c.protocols = ProtocolSet::FromBits(mask);
        out.push_back(c);
      }
    }
    return out;
  }

  std::vector<uint64_t> bounds;
  bounds.reserve(cubes.size() * 2);
  for (const HeaderCube& c : cubes) {
    Span s = GetSpan(c, dim);
    bounds.push_back(s.lo);
    bounds.push_back(s.hi + 1);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<HeaderCube> run_slice;
  uint64_t run_lo = 0;
  uint64_t run_end = 0;
  bool in_run = false;
  auto flush = [&] {
    if (!in_run) return;
    for (HeaderCube c : run_slice) {
      SetSpan(c, dim, run_lo, run_end - 1);
      out.push_back(c);
    }
    in_run = false;
  };

  for (size_t k = 0; k + 1 < bounds.size(); ++k) {
    const uint64_t lo = bounds[k];
    const uint64_t end = bounds[k + 1];
    std::vector<HeaderCube> covering;
    for (const HeaderCube& c : cubes) {
      Span s = GetSpan(c, dim);
      if (s.lo <= lo && lo <= s.hi) covering.push_back(c);
    }
    std::vector<HeaderCube> slice;
    if (dim == kPort) {
      if (!covering.empty()) slice.push_back(ZeroCube());
    } else {
      slice = CanonicalFrom(covering, dim + 1);
    }
    if (slice.empty()) {
      flush();
      continue;
    }
    if (in_run && run_end == lo && slice == run_slice) {
      run_end = end;
      continue;
    }
    flush();
    run_slice = std::move(slice);
    run_lo = lo;
    run_end = end;
    in_run = true;
  }
  flush();
  return out;
}

// Appends the pieces of `a` outside `b` to `out`; at most seven pieces,
// peeled off in dimension order.
void SubtractCube(const HeaderCube& a, const HeaderCube& b,
                  std::vector<HeaderCube>& out) {
  if (!a.overlaps(b)) {
    out.push_back(a);
    return;
  }
  HeaderCube rest = a;
  for (int dim : {kSrc, kDst}) {
    Span r = GetSpan(rest, dim);
    Span s = GetSpan(b, dim);
    if (r.lo < s.lo) {
      HeaderCube piece = rest;
      SetSpan(piece, dim, r.lo, s.lo - 1);
      out.push_back(piece);
      r.lo = s.lo;
    }
    if (r.hi > s.hi) {
      HeaderCube piece = rest;
      SetSpan(piece, dim, s.hi + 1, r.hi);
      out.push_back(piece);
      r.hi = s.hi;
    }
    SetSpan(rest, dim, r.lo, r.hi);
  }
  ProtocolSet outside = rest.protocols - b.protocols;
  if (!outside.empty()) {
    HeaderCube piece = rest;
    piece.protocols = outside;
    out.push_back(piece);
    rest.protocols = rest.protocols & b.protocols;
  }
  Span r = GetSpan(rest, kPort);
  Span s = GetSpan(b, kPort);
  if (r.lo < s.lo) {
    HeaderCube piece = rest;
    SetSpan(piece, kPort, r.lo, s.lo - 1);
    out.push_back(piece);
  }
  if (r.hi > s.hi) {
    HeaderCube piece = rest;
    SetSpan(piece, kPort, s.hi + 1, r.hi);
    out.push_back(piece);
  }
}

// Raw (non-canonical, disjoint) pieces of `cubes` outside every cube of
// `removed`.
std::vector<HeaderCube> SubtractAll(std::vector<HeaderCube> cubes,
                                    const std::vector<HeaderCube>& removed) {
  for (const HeaderCube& b : removed) {
    std::vector<HeaderCube> next;
    next.reserve(cubes.size());
    for (const HeaderCube& a : cubes) SubtractCube(a, b, next);
    cubes = std::move(next);
    if (cubes.empty()) break;
  }
  return cubes;
}

uint64_t FieldMax(int bits) {
  return bits >= 64 ? std::numeric_limits<uint64_t>::max()
                    : (uint64_t{1} << bits) - 1;
}

std::optional<uint32_t> ParseDottedQuad(std::string_view text) {
  uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    size_t dot = text.find('.');
    if (i < 3 && dot == std::string_view::npos) return std::nullopt;
    std::string_view part = i < 3 ? text.substr(0, dot) : text;
    unsigned octet = 0;
    auto [end, ec] =
        std::from_chars(part.data(), part.data() + part.size(), octet);
    if (part.empty() || part.size() > 3 || ec != std::errc() ||
        end != part.data() + part.size() || octet > 255) {
      return std::nullopt;
    }
    value = (value << 8) | octet;
    if (i < 3) text.remove_prefix(dot + 1);
  }
  return value;
}

std::optional<uint64_t> ParseUnsigned(std::string_view text) {
  if (text.empty()) return std::nullopt;
  uint64_t value = 0;
  auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view ProtocolName(Protocol protocol) {
  switch (protocol) {
    case Protocol::kTcp:
      return "tcp";
    case Protocol::kUdp:
      return "udp";
    case Protocol::kIcmp:
      return "icmp";
  }
  return "?";
}

std::optional<Protocol> ParseProtocol(std::string_view name) {
  for (Protocol p : kAllProtocols) {
    if (ProtocolName(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<Protocol> ProtocolSet::lowest() const {
  for (Protocol p : kAllProtocols) {
    if (contains(p)) return p;
  }
  return std::nullopt;
}

bool HeaderCube::contains(const HeaderPoint& p) const {
  return src.contains(p.src_ip) && dst.contains(p.dst_ip) &&
         protocols.contains(p.protocol) && ports.contains(p.dst_port);
}

bool HeaderCube::contains(const HeaderCube& other) const {
  return src.contains(other.src) && dst.contains(other.dst) &&
         (other.protocols - protocols).empty() && ports.contains(other.ports);
}

bool HeaderCube::overlaps(const HeaderCube& other) const {
  return src.overlaps(other.src) && dst.overlaps(other.dst) &&
         !(protocols & other.protocols).empty() && ports.overlaps(other.ports);
}

std::optional<HeaderCube> HeaderCube::intersection(
    const HeaderCube& other) const {
  if (!overlaps(other)) return std::nullopt;
  return HeaderCube{
      {std::max(src.lo, other.src.lo), std::min(src.hi, other.src.hi)},
      {std::max(dst.lo, other.dst.lo), std::min(dst.hi, other.dst.hi)},
      protocols & other.protocols,
      {std::max(ports.lo, other.ports.lo), std::min(ports.hi, other.ports.hi)},
  };
}

HeaderPoint HeaderCube::min_point() const {
  return {src.lo, dst.lo, protocols.lowest().value_or(Protocol::kTcp),
          ports.lo};
}

HeaderCube UniverseSpec::full_cube() const {
  return HeaderCube{
      {0, static_cast<uint32_t>(FieldMax(src_bits))},
      {0, static_cast<uint32_t>(FieldMax(dst_bits))},
      protocols,
      {0, static_cast<uint16_t>(FieldMax(port_bits))},
  };
}

bool UniverseSpec::contains(const HeaderCube& cube) const {
  return full_cube().contains(cube);
}

std::optional<uint64_t> UniverseSpec::size() const {
  int bits = src_bits + dst_bits + port_bits;
  if (bits >= 62) return std::nullopt;
  return (uint64_t{1} << bits) * static_cast<uint64_t>(protocols.size());
}

PacketSet::PacketSet(const HeaderCube& cube) {
  if (!cube.valid()) throw std::invalid_argument("invalid header cube");
  cubes_.push_back(cube);
}

PacketSet Canonical(std::vector<HeaderCube> disjoint) {
  PacketSet result;
  result.cubes_ = CanonicalFrom(disjoint, kSrc);
  return result;
}

PacketSet PacketSet::FromCubes(std::span<const HeaderCube> cubes) {
  std::vector<HeaderCube> disjoint;
  for (const HeaderCube& c : cubes) {
    if (!c.valid()) throw std::invalid_argument("invalid header cube");
    std::vector<HeaderCube> pieces = SubtractAll({c}, disjoint);
    disjoint.insert(disjoint.end(), pieces.begin(), pieces.end());
  }
  return Canonical(std::move(disjoint));
}

PacketSet PacketSet::Universe(const UniverseSpec& u) {
  return PacketSet(u.full_cube());
}

PacketSet Union(const PacketSet& a, const PacketSet& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<HeaderCube> cubes = a.cubes();
  std::vector<HeaderCube> extra = SubtractAll(b.cubes(), a.cubes());
  cubes.insert(cubes.end(), extra.begin(), extra.end());
  return Canonical(std::move(cubes));
}

PacketSet Intersect(const PacketSet& a, const PacketSet& b) {
  std::vector<HeaderCube> cubes;
  for (const HeaderCube& x : a.cubes()) {
    for (const HeaderCube& y : b.cubes()) {
      if (auto z = x.intersection(y)) cubes.push_back(*z);
    }
  }
  return Canonical(std::move(cubes));
}

PacketSet Difference(const PacketSet& a, const PacketSet& b) {
  if (a.empty() || b.empty()) return a;
  return Canonical(SubtractAll(a.cubes(), b.cubes()));
}

bool IsEmpty(const PacketSet& a) { return a.cubes().empty(); }

bool IsSubset(const PacketSet& a, const PacketSet& b) {
  return IsEmpty(Difference(a, b));
}

bool Member(const HeaderPoint& p, const PacketSet& a) {
  return std::any_of(a.cubes().begin(), a.cubes().end(),
                     [&](const HeaderCube& c) { return c.contains(p); });
}

std::optional<HeaderPoint> Witness(const PacketSet& a) {
  std::optional<HeaderPoint> best;
  for (const HeaderCube& c : a.cubes()) {
    HeaderPoint p = c.min_point();
    if (!best || p < *best) best = p;
  }
  return best;
}

uint64_t Cardinality(const PacketSet& a, const UniverseSpec& u) {
  unsigned __int128 total = 0;
  for (const HeaderCube& c : a.cubes()) {
    if (!u.contains(c)) {
      throw InputError("cardinality",
                       "cube " + FormatCube(c) + " exceeds the universe");
    }
    total += static_cast<unsigned __int128>(c.src.size()) * c.dst.size() *
             static_cast<uint64_t>(c.protocols.size()) * c.ports.size();
  }
  if (total > std::numeric_limits<uint64_t>::max()) {
    throw InputError("cardinality", "point count exceeds 64 bits");
  }
  return static_cast<uint64_t>(total);
}

AddressSet NormalizeAddressSet(AddressSet ranges) {
  std::sort(ranges.begin(), ranges.end());
  AddressSet out;
  for (const AddressRange& r : ranges) {
    if (!out.empty() && uint64_t{out.back().hi} + 1 >= r.lo) {
      out.back().hi = std::max(out.back().hi, r.hi);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

bool AddressSetContains(const AddressSet& outer, const AddressSet& inner) {
  AddressSet normalized = NormalizeAddressSet(outer);
  return std::all_of(inner.begin(), inner.end(), [&](const AddressRange& r) {
    return std::any_of(normalized.begin(), normalized.end(),
                       [&](const AddressRange& o) { return o.contains(r); });
  });
}

AddressRange ParseAddressRange(std::string_view text, std::string_view field) {
  text = Trim(text);
  const std::string f(field);
  if (text == "*") return kAllAddresses;
  if (size_t slash = text.find('/'); slash != std::string_view::npos) {
    auto base = ParseDottedQuad(text.substr(0, slash));
    auto bits = ParseUnsigned(text.substr(slash + 1));
    if (!base)
      throw InputError(f, "malformed address '" + std::string(text) + "'");
    if (!bits || *bits > 32) {
      throw InputError(f, "malformed CIDR mask in '" + std::string(text) + "'");
    }
    const uint64_t host = (uint64_t{1} << (32 - *bits)) - 1;
    const uint32_t network = static_cast<uint32_t>(*base & ~host);
    return {network, static_cast<uint32_t>(network + host)};
  }
  if (size_t dash = text.find('-'); dash != std::string_view::npos) {
    auto lo = ParseDottedQuad(Trim(text.substr(0, dash)));
    auto hi = ParseDottedQuad(Trim(text.substr(dash + 1)));
    if (!lo || !hi) {
      throw InputError(f,
                       "malformed address range '" + std::string(text) + "'");
    }
    if (*lo > *hi) {
      throw InputError(f, "inverted address range '" + std::string(text) + "'");
    }
    return {*lo, *hi};
  }
  auto single = ParseDottedQuad(text);
  if (!single)
    throw InputError(f, "malformed address '" + std::string(text) + "'");
  return {*single, *single};
}

PortRange ParsePortRange(std::string_view text, std::string_view field) {
  text = Trim(text);
  const std::string f(field);
  if (text == "*") return kAllPorts;
  auto parse_port = [&](std::string_view s) -> uint16_t {
    auto v = ParseUnsigned(Trim(s));
    if (!v || *v > 0xffff) {
      throw InputError(f, "malformed port '" + std::string(text) + "'");
    }
    return static_cast<uint16_t>(*v);
  };
  if (size_t dash = text.find('-'); dash != std::string_view::npos) {
    uint16_t lo = parse_port(text.substr(0, dash));
    uint16_t hi = parse_port(text.substr(dash + 1));
    if (lo > hi) {
      throw InputError(f, "inverted port range '" + std::string(text) + "'");
    }
    return {lo, hi};
  }
  uint16_t port = parse_port(text);
  return {port, port};
}

ProtocolSet ParseProtocolSet(std::string_view text, std::string_view field) {
  text = Trim(text);
  if (text == "*") return ProtocolSet::All();
  ProtocolSet out;
  while (true) {
    size_t comma = text.find(',');
    std::string_view name = Trim(text.substr(0, comma));
    auto p = ParseProtocol(name);
    if (!p) {
      throw InputError(std::string(field),
                       "unknown protocol '" + std::string(name) + "'");
    }
    out = out | ProtocolSet::Of(*p);
    if (comma == std::string_view::npos) return out;
    text = text.substr(comma + 1);
  }
}

HeaderCube CubeOf(std::string_view src, std::string_view dst,
                  std::string_view protocol, std::string_view port) {
  return HeaderCube{
      ParseAddressRange(src, "src"),
      ParseAddressRange(dst, "dst"),
      ParseProtocolSet(protocol, "protocol"),
      ParsePortRange(port, "port"),
  };
}

std::string FormatAddress(uint32_t address) {
  return std::to_string(address >> 24) + "." +
         std::to_string((address >> 16) & 0xff) + "." +
         std::to_string((address >> 8) & 0xff) + "." +
         std::to_string(address & 0xff);
}

std::string FormatAddressRange(const AddressRange& range) {
  if (range.lo == range.hi) return FormatAddress(range.lo);
  return FormatAddress(range.lo) + "-" + FormatAddress(range.hi);
}

std::string FormatPortRange(const PortRange& range) {
  if (range.lo == range.hi) return std::to_string(range.lo);
  return std::to_string(range.lo) + "-" + std::to_string(range.hi);
}

std::string FormatProtocolSet(ProtocolSet protocols) {
  std::string out;
  for (Protocol p : kAllProtocols) {
    if (!protocols.contains(p)) continue;
    if (!out.empty()) out += ",";
    out += ProtocolName(p);
  }
  return out;
}

std::string FormatPoint(const HeaderPoint& p) {
  return FormatAddress(p.src_ip) + " -> " + FormatAddress(p.dst_ip) + " " +
         std::string(ProtocolName(p.protocol)) + "/" +
         std::to_string(p.dst_port);
}

std::string FormatCube(const HeaderCube& cube) {
  return FormatAddressRange(cube.src) + " -> " + FormatAddressRange(cube.dst) +
         " " + FormatProtocolSet(cube.protocols) + " " +
         FormatPortRange(cube.ports);
}

}  // namespace fwcheck
