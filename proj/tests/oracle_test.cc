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

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "fwcheck/errors.h"
#include "fwcheck/job.h"
#include "support/random_instances.h"

namespace fwcheck {
namespace {

using testing::InCube;
using testing::NaiveFirstMatch;
using testing::RandomCubes;
using testing::RandomFilter;
using testing::SmallUniverse;

VerificationJob CaseStudy(const char* topology) {
  return LoadJob({FWCHECK_DATA_DIR "/case_study/policy_fixed.json",
                  std::string(FWCHECK_DATA_DIR "/case_study/") + topology,
                  std::nullopt});
}

// A job replayed on its compressed model.
struct Small {
  explicit Small(const VerificationJob& job)
      : model(DownscaledModel::Compress(job.InputCubes())),
        policy(EffectiveDomains(job.elements, job.priorities)) {
    for (const auto& [id, f] : job.firewalls) {
      firewalls.emplace(id, model.MapFirewall(f));
    }
    topology = &job.topology;
  }

  std::vector<FirewallPath> Paths(const char* element) const {
    const PolicyElement& e = policy.find(element)->element;
    std::vector<FirewallPath> out;
    for (const auto& seq : topology->PathsFor(e.src_zone, e.dst_zone)) {
      FirewallPath p;
      for (const auto& id : seq) p.push_back(std::cref(firewalls.at(id)));
      out.push_back(std::move(p));
    }
    return out;
  }

  PacketSet Domain(const char* element) const {
    return model.MapSet(policy.find(element)->effective_domain);
  }

  DownscaledModel model;
  EffectivePolicy policy;
  FirewallTable firewalls;
  const Topology* topology = nullptr;
};

HeaderPoint Ssh() {
  return {ParseAddressRange("10.1.2.3", "t").lo,
          ParseAddressRange("192.168.2.2", "t").lo, Protocol::kTcp, 22};
}

TEST_CASE("path simulation") {
  CHECK(SimulatePath({}, Ssh()).accepted);
  VerificationJob original = CaseStudy("topology_original.json");
  VerificationJob corrected = CaseStudy("topology_corrected.json");
  FirewallPath p_orig{original.firewalls.at("F1"), original.firewalls.at("F2")};
  FirewallPath p_corr{corrected.firewalls.at("F1"),
                      corrected.firewalls.at("F2")};
  CHECK(SimulatePath(p_orig, Ssh()).accepted);
  PathOutcome o = SimulatePath(p_corr, Ssh());
  CHECK_FALSE(o.accepted);
  CHECK(o.denied_at == 2);
}

TEST_CASE("compression keeps membership") {
  VerificationJob job = CaseStudy("topology_original.json");
  std::vector<HeaderCube> cubes = job.InputCubes();
  DownscaledModel m = DownscaledModel::Compress(cubes);
  REQUIRE(m.universe().size().has_value());
  CHECK(*m.universe().size() <= kMaxEnumerablePoints);

  std::vector<HeaderCube> small;
  for (const HeaderCube& c : cubes) small.push_back(m.MapCube(c));
  int errors = 0;
  ForEachPoint(m.universe(), [&](const HeaderPoint& p) {
    HeaderPoint big = m.Lift(p);
    for (size_t i = 0; i < cubes.size(); ++i) {
      if (InCube(cubes[i], big) != InCube(small[i], p)) ++errors;
    }
  });
  CHECK(errors == 0);
  for (size_t i = 0; i < cubes.size(); ++i) {
    for (size_t j = 0; j < cubes.size(); ++j) {
      CHECK(cubes[i].contains(cubes[j]) == small[i].contains(small[j]));
      CHECK(cubes[i].overlaps(cubes[j]) == small[i].overlaps(small[j]));
    }
  }

  HeaderCube odd = CubeOf("10.0.0.7", "*", "*", "*");
  CHECK_THROWS_AS(m.MapCube(odd), InputError);
}

TEST_CASE("compression refuses oversized models") {
  std::vector<HeaderCube> many;
  for (uint32_t i = 0; i < 200; ++i) {
    many.push_back({{i * 7, i * 7 + 1},
                    {i * 11, i * 11 + 2},
                    ProtocolSet::All(),
                    {uint16_t(i * 3), uint16_t(i * 3 + 1)}});
  }
  CHECK_THROWS_AS(DownscaledModel::Compress(many), InputError);
  CHECK_THROWS_AS(
      OracleCheckPositive(PacketSet::Universe(), {}, UniverseSpec::Ipv4()),
      InputError);
}

TEST_CASE("oracle verdicts on the case study") {
  VerificationJob original = CaseStudy("topology_original.json");
  Small s_orig(original);
  const UniverseSpec& u_orig = s_orig.model.universe();
  OracleResult dns =
      OracleCheckPositive(s_orig.Domain("sd4"), s_orig.Paths("sd4"), u_orig);
  CHECK_FALSE(dns.holds);
  REQUIRE(dns.counterexample.has_value());
  CHECK(dns.counterexample->path_index == 1);
  CHECK(dns.counterexample->firewall_index == 2);

  OracleResult ssh =
      OracleCheckRestrictive(s_orig.Domain("sd2"), s_orig.Paths("sd2"), u_orig);
  CHECK_FALSE(ssh.holds);
  REQUIRE(ssh.counterexample.has_value());
  CHECK(ssh.counterexample->path_index == 1);
  CHECK(
      OracleCheckRestrictive(s_orig.Domain("sd1"), s_orig.Paths("sd1"), u_orig)
          .holds);
  CHECK(OracleCheckPositive(PacketSet(), s_orig.Paths("sd4"), u_orig).holds);
  CHECK(OracleCheckRestrictive(PacketSet(), s_orig.Paths("sd2"), u_orig).holds);

  VerificationJob corrected = CaseStudy("topology_corrected.json");
  Small s_corr(corrected);
  const UniverseSpec& u_corr = s_corr.model.universe();
  CHECK(OracleCheckPositive(s_corr.Domain("sd4"), s_corr.Paths("sd4"), u_corr)
            .holds);
  CHECK(
      OracleCheckRestrictive(s_corr.Domain("sd2"), s_corr.Paths("sd2"), u_corr)
          .holds);
  OracleResult ssh_leak = OracleCheckRestrictive(s_corr.Domain("e5_1"),
                                                 s_corr.Paths("e5_1"), u_corr);
  CHECK_FALSE(ssh_leak.holds);
  CHECK(ssh_leak.counterexample->path_index == 1);
}

TEST_CASE("simulation agrees with accepted sets") {
  std::mt19937 rng(31);
  UniverseSpec u = SmallUniverse();
  DownscaledModel id = DownscaledModel::Identity(u);
  for (int t = 0; t < 100; ++t) {
    std::vector<FirewallConfig> fws;
    int len = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < len; ++i) {
      std::vector<FilteringRule> rules;
      int m = std::uniform_int_distribution<int>(0, 4)(rng);
      for (int r = 1; r <= m; ++r) {
        rules.push_back({r, RandomFilter(rng),
                         rng() % 2 ? Action::kAccept : Action::kDeny});
      }
      fws.emplace_back("F" + std::to_string(i),
                       rng() % 2 ? Action::kAccept : Action::kDeny, rules);
    }
    std::vector<PacketSet> accepted;
    for (const auto& f : fws) accepted.push_back(AcceptedSet(f, u));
    FirewallPath path(fws.begin(), fws.end());
    int errors = 0;
    ForEachPoint(u, [&](const HeaderPoint& p) {
      CHECK(id.Lift(p) == p);
      PathOutcome o = SimulatePath(path, p);
      bool all = true;
      int first_deny = 0;
      for (size_t n = 0; n < fws.size(); ++n) {
        bool a = Member(p, accepted[n]);
        if (!a && first_deny == 0) first_deny = int(n) + 1;
        all = all && a;
        if (a != (NaiveFirstMatch(fws[n], p) == Action::kAccept)) ++errors;
      }
      if (o.accepted != all || o.denied_at != first_deny) ++errors;
    });
    CHECK(errors == 0);
  }
}

TEST_CASE("counterexamples are the smallest failing packets") {
  std::mt19937 rng(37);
  UniverseSpec u = SmallUniverse();
  for (int t = 0; t < 100; ++t) {
    FirewallConfig f("F", Action::kAccept,
                     {{1, RandomFilter(rng), Action::kDeny}});
    PacketSet s = PacketSet::FromCubes(RandomCubes(rng, 3));
    FirewallPath path{f};
    std::vector<FirewallPath> paths{path};
    OracleResult r = OracleCheckPositive(s, paths, u);
    PacketSet bad = Intersect(s, DeniedSet(f, u));
    CHECK(r.holds == bad.empty());
    if (!r.holds) CHECK(r.counterexample->packet == *Witness(bad));
  }
}

}  // namespace
}  // namespace fwcheck
