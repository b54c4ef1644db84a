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

// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fwcheck/conformance_engine.h"
#include "fwcheck/firewall_model.h"
#include "fwcheck/job.h"
#include "fwcheck/oracle.h"
#include "fwcheck/packetspace.h"
#include "fwcheck/policy_model.h"
#include "fwcheck/report.h"
#include "support/random_instances.h"

namespace fwcheck {
namespace {

using testing::InCube;
using testing::kSmallPoints;
using testing::NaiveFirstMatch;
using testing::PointAt;
using testing::SmallUniverse;

// Runtime limits in seconds; 0 means untimed.
constexpr double kLimitShadowing = 1.0;
constexpr double kLimitCoherence = 1.0;
constexpr double kLimitLan = 0.0;
constexpr double kLimitAcceptResidual = 1.0;
constexpr double kLimitDenyLeak = 1.0;
constexpr double kLimitCorrected = 2.0;
constexpr double kLimitEngineVersusOracle = 60.0;
constexpr double kLimitAlgebra = 30.0;
constexpr double kLimitDeterminism = 0.0;

constexpr int kRandomInstances = 1000;
constexpr int kAlgebraTriples = 10000;
constexpr uint32_t kInstanceSeed = 20260101;
constexpr uint32_t kAlgebraSeed = 20260202;

// Collects failed expectations of one criterion.
class Expect {
 public:
  void operator()(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string Summary() const {
    std::string s;
    for (const auto& f : failures_) s += "\n    " + f;
    if (count_ > int(failures_.size())) {
      s += "\n    ... " + std::to_string(count_ - int(failures_.size())) +
           " more";
    }
    return s;
  }

 private:
  std::vector<std::string> failures_;
  int count_ = 0;
};

std::string Data(const std::string& rel) {
  return std::string(FWCHECK_DATA_DIR) + "/" + rel;
}

VerificationJob CaseStudy(const char* policy, const char* topology) {
  return LoadJob({Data(std::string("case_study/") + policy),
                  Data(std::string("case_study/") + topology), std::nullopt});
}

HeaderPoint Point(const char* src, const char* dst, Protocol p, int port) {
  return {ParseAddressRange(src, "src").lo, ParseAddressRange(dst, "dst").lo, p,
          static_cast<uint16_t>(port)};
}

const Violation* FindViolation(const VerificationReport& r,
                               const std::string& element, int path_index) {
  for (const Violation& v : r.violations) {
    if (v.element == element && v.path_index == path_index) return &v;
  }
  return nullptr;
}

void Shadowing(Expect& expect) {
  FilteringRule r1{1, CubeOf("214.0.0.0/8", "*", "tcp", "*"), Action::kAccept};
  FilteringRule r2{2, CubeOf("214.65.0.0/16", "*", "tcp", "445"),
                   Action::kDeny};
  FirewallConfig f("T", Action::kDeny, {r1, r2});
  HeaderPoint smb = Point("214.65.0.1", "0.0.0.0", Protocol::kTcp, 445);
  expect(EffectiveDomain(f, 2).empty(), "rule 2 effective domain is empty");
  expect(FirstMatchAction(f, smb) == Action::kAccept, "original order accepts");
  FirewallConfig g("T", Action::kDeny,
                   {{1, r2.filter, r2.action}, {2, r1.filter, r1.action}});
  expect(FirstMatchAction(g, smb) == Action::kDeny, "swapped order denies");
}

void Coherence(Expect& expect) {
  VerificationJob original =
      CaseStudy("policy_original.json", "topology_original.json");
  CoherenceReport r = CheckCoherence(EffectiveDomains(original.elements, {}));
  expect(!r.coherent, "original policy is incoherent");
  expect(r.conflicts.size() == 1, "exactly one conflict");
  if (r.conflicts.size() == 1) {
    const Conflict& c = r.conflicts[0];
    expect(c.first == "sd1" && c.second == "sd3", "conflict is (sd1, sd3)");
    PacketSet telnet(CubeOf("193.95.0.0/16", "10.1.1.2", "tcp", "23"));
    expect(Member(c.witness, telnet), "witness is Z1 -> 10.1.1.2 tcp 23");
  }
  VerificationJob fixed =
      CaseStudy("policy_fixed.json", "topology_original.json");
  expect(CheckCoherence(EffectiveDomains(fixed.elements, {})).coherent,
         "telnet-excepted policy is coherent");
}

void LanExample(Expect& expect) {
  JobPaths paths{Data("lan_example/policy.json"),
                 Data("lan_example/topology.json"), std::nullopt};
  VerificationJob plain = LoadJob(paths);
  AddressRange prime = plain.topology.zone("LAN_A_prime").addresses.front();
  AddressRange second = plain.topology.zone("LAN_A_second").addresses.front();
  expect(prime.overlaps(second), "the two LAN_A sub-zones share machines");

  auto conflicts = DetectConflicts(plain.elements);
  expect(conflicts.size() == 1, "exactly one conflict");
  if (conflicts.size() == 1) {
    expect(conflicts[0].first == "sd1" && conflicts[0].second == "e22",
           "conflict is (sd1, e22)");
  }
  paths.priorities = Data("lan_example/priorities.json");
  VerificationJob ranked = LoadJob(paths);
  EffectivePolicy ep = EffectiveDomains(ranked.elements, ranked.priorities);
  expect(CheckCoherence(ep).coherent, "coherent after priorities");
  PacketSet accept;
  for (const EffectiveElement* e : ep.accept_elements()) {
    accept = Union(accept, e->effective_domain);
  }
  auto raw = [&](const char* id) { return ep.find(id)->element.raw_domain; };
  expect(accept == Union(raw("e21"), Difference(raw("e22"), raw("sd1"))),
         "accept domain is e21 plus e22 outside sd1");
}

void AcceptResidual(Expect& expect) {
  VerificationJob job =
      CaseStudy("policy_fixed.json", "topology_original.json");
  expect(job.firewalls.at("F1").default_action() == Action::kAccept &&
             job.firewalls.at("F2").default_action() == Action::kDeny &&
             job.firewalls.at("F3").default_action() == Action::kAccept,
         "fixture defaults are accept, deny, accept");
  VerificationReport r = Run(job, {RunMode::kFull, false});
  const Violation* v = FindViolation(r, "sd4", 1);
  expect(v != nullptr, "sd4 violation on path 1");
  if (!v) return;
  expect(v->path == FirewallSequence{"F1", "F2"}, "path is (F1, F2)");
  expect(v->firewall_index == 2 && v->firewall == "F2", "at firewall 2 (F2)");
  expect(v->kind == ViolationKind::kUncoveredResidual,
         "kind uncovered-residual");
  expect(Member(Point("10.96.0.1", "192.168.2.1", Protocol::kUdp, 53),
                v->residual),
         "residual holds 10.96.0.1 -> 192.168.2.1 udp 53");
  PacketSet fields(CubeOf("10.0.0.0/8", "192.168.2.1", "udp", "53"));
  expect(Member(v->witness, fields), "witness meets the field constraints");
}

void DenyLeak(Expect& expect) {
  VerificationJob job =
      CaseStudy("policy_fixed.json", "topology_original.json");
  VerificationReport r = Run(job, {RunMode::kFull, false});
  const Violation* v = FindViolation(r, "sd2", 1);
  expect(v != nullptr, "sd2 violation on path 1");
  if (!v) return;
  expect(v->path == FirewallSequence{"F1", "F2"}, "path is (F1, F2)");
  expect(v->kind == ViolationKind::kRestrictiveLeak, "kind restrictive-leak");
  expect(v->residual ==
             PacketSet(CubeOf("10.0.0.0/8", "192.168.2.2", "tcp", "22")),
         "leaked set equals 10.0.0.0/8 -> 192.168.2.2 tcp 22");
  expect(v->firewall == "F2" && v->rule == 2, "accepting rule is F2 rule 2");
}

// Engine and oracle verdicts per element on the compressed model of a job.
struct Verdicts {
  std::map<std::string, bool> engine;
  std::map<std::string, bool> oracle;
  std::map<std::string, std::optional<OracleCounterexample>> counterexample;
};

Verdicts BothVerdicts(const VerificationJob& job) {
  Verdicts out;
  EffectivePolicy ep = EffectiveDomains(job.elements, job.priorities);
  ConformanceReport cr = CheckConformance(ep, job.firewalls, job.topology);
  for (const DirectiveCheck& d : cr.directives)
    out.engine[d.element_id] = d.success;

  DownscaledModel model = DownscaledModel::Compress(job.InputCubes());
  FirewallTable small;
  for (const auto& [id, f] : job.firewalls)
    small.emplace(id, model.MapFirewall(f));
  for (const EffectiveElement& e : ep.elements) {
    std::vector<FirewallPath> paths;
    for (const auto& seq :
         job.topology.PathsFor(e.element.src_zone, e.element.dst_zone)) {
      FirewallPath p;
      for (const auto& id : seq) p.push_back(std::cref(small.at(id)));
      paths.push_back(std::move(p));
    }
    PacketSet dom = model.MapSet(e.effective_domain);
    OracleResult o = e.element.action == Action::kAccept
                         ? OracleCheckPositive(dom, paths, model.universe())
                         : OracleCheckRestrictive(dom, paths, model.universe());
    out.oracle[e.element.id] = o.holds;
    out.counterexample[e.element.id] = o.counterexample;
  }
  return out;
}

void Corrected(Expect& expect) {
  VerificationJob job =
      CaseStudy("policy_fixed.json", "topology_corrected.json");
  Verdicts v = BothVerdicts(job);
  for (const char* id : {"sd3", "sd4", "sd5", "sd1", "sd2"}) {
    expect(v.engine.at(id), std::string(id) + " conforms by the engine");
    expect(v.oracle.at(id), std::string(id) + " conforms by the oracle");
  }
  expect(v.engine.at("e5_1") == v.oracle.at("e5_1"),
         "engine and oracle agree on e5_1");
  expect(!v.engine.at("e5_1"), "e5_1 leaks");
  const auto& cx = v.counterexample.at("e5_1");
  expect(cx && cx->path_index == 1, "oracle leak on path (F1, F2)");
  VerificationReport r = Run(job, {RunMode::kFull, false});
  const Violation* leak = FindViolation(r, "e5_1", 1);
  expect(leak && leak->firewall == "F2" && leak->rule == 3,
         "engine traces the leak to F2 rule 3");
}

void EngineVersusOracle(Expect& expect, int& mismatches) {
  std::mt19937 rng(kInstanceSeed);
  const UniverseSpec u = SmallUniverse();
  for (int t = 0; t < kRandomInstances; ++t) {
    auto inst = testing::MakeRandomInstance(rng);
    std::string tag = "instance " + std::to_string(t) + ": ";
    EffectivePolicy ep = EffectiveDomains(inst.elements, inst.priorities);
    ConformanceReport cr = CheckConformance(ep, inst.firewalls, inst.topology);
    auto naive = testing::NaiveEffectiveDomains(inst.directives);
    for (const DirectiveCheck& d : cr.directives) {
      const EffectiveElement& e = *ep.find(d.element_id);
      const PacketSet& dom = e.effective_domain;
      auto seqs =
          inst.topology.PathsFor(e.element.src_zone, e.element.dst_zone);
      std::vector<FirewallPath> paths;
      for (const auto& seq : seqs) {
        FirewallPath p;
        for (const auto& id : seq)
          p.push_back(std::cref(inst.firewalls.at(id)));
        paths.push_back(std::move(p));
      }
      bool positive = e.element.action == Action::kAccept;
      OracleResult o = positive ? OracleCheckPositive(dom, paths, u)
                                : OracleCheckRestrictive(dom, paths, u);
      bool reference = testing::NaiveElementHolds(
          naive.at(d.element_id), e.element.action, seqs, inst.firewalls);
      bool same = d.success == o.holds && d.success == reference;
      if (!same) ++mismatches;
      expect(same, tag + d.element_id + " verdict differs from the oracle");
      if (d.vacuous) continue;

      for (size_t i = 0; i < d.paths.size(); ++i) {
        const PathCheck& pc = d.paths[i];
        std::vector<FirewallPath> one{paths[i]};
        if (positive) {
          for (size_t n = 0; n < pc.positive.size(); ++n) {
            const PositiveVerdict& v = pc.positive[n];
            FirewallPath single{paths[i][n]};
            std::vector<FirewallPath> just{single};
            bool holds = OracleCheckPositive(dom, just, u).holds;
            if (v.success != holds) ++mismatches;
            expect(v.success == holds, tag + "per-firewall verdict differs");
            if (v.success) continue;
            expect(!v.failure_set.empty() && IsSubset(v.failure_set, dom),
                   tag + "failure set is a nonempty part of the domain");
            expect(v.witness && Member(*v.witness, v.failure_set) &&
                       !SimulatePath(single, *v.witness).accepted,
                   tag + "positive witness is denied by the firewall");
          }
        } else {
          const RestrictiveVerdict& v = *pc.restrictive;
          bool holds = OracleCheckRestrictive(dom, one, u).holds;
          if (v.success != holds) ++mismatches;
          expect(v.success == holds, tag + "per-path verdict differs");
          PacketSet prev = dom;
          for (const PacketSet& c : v.carried) {
            expect(IsSubset(c, prev), tag + "carried sets shrink");
            prev = c;
          }
          if (v.success) continue;
          expect(!v.leaked.empty() && IsSubset(v.leaked, dom),
                 tag + "leak is a nonempty part of the domain");
          expect(v.witness && Member(*v.witness, v.leaked) &&
                     SimulatePath(paths[i], *v.witness).accepted,
                 tag + "restrictive witness passes the whole path");
        }
      }
    }
  }
}

void Algebra(Expect& expect) {
  std::mt19937 rng(kAlgebraSeed);
  const UniverseSpec u = SmallUniverse();
  const PacketSet all = PacketSet::Universe(u);
  std::uniform_int_distribution<int> point(0, kSmallPoints - 1);
  auto inside = [](const std::vector<HeaderCube>& cubes, const HeaderPoint& p) {
    for (const HeaderCube& c : cubes) {
      if (InCube(c, p)) return true;
    }
    return false;
  };
  for (int t = 0; t < kAlgebraTriples; ++t) {
    auto ca = testing::RandomCubes(rng, 4);
    auto cb = testing::RandomCubes(rng, 4);
    auto cc = testing::RandomCubes(rng, 4);
    PacketSet a = PacketSet::FromCubes(ca);
    PacketSet b = PacketSet::FromCubes(cb);
    PacketSet c = PacketSet::FromCubes(cc);
    PacketSet na = all - a;
    PacketSet nb = all - b;
    std::string tag = "triple " + std::to_string(t) + ": ";

    expect((a | b) == (b | a) && (a & b) == (b & a), tag + "commutativity");
    expect(((a | b) | c) == (a | (b | c)) && ((a & b) & c) == (a & (b & c)),
           tag + "associativity");
    expect((a & (b | c)) == ((a & b) | (a & c)) &&
               (a | (b & c)) == ((a | b) & (a | c)),
           tag + "distributivity");
    expect((a | PacketSet()) == a && (a & all) == a, tag + "identity");
    expect((a & PacketSet()).empty() && (a | all) == all, tag + "annihilator");
    expect((a | a) == a && (a & a) == a, tag + "idempotence");
    expect((a | (a & b)) == a && (a & (a | b)) == a, tag + "absorption");
    expect((a | na) == all && (a & na).empty(), tag + "complement");
    expect((all - na) == a, tag + "double complement");
    expect((all - (a | b)) == (na & nb) && (all - (a & b)) == (na | nb),
           tag + "De Morgan");
    expect((a - b) == (a & nb), tag + "difference as meet with complement");
    expect(IsSubset(a & b, a) && IsSubset(a, a | b), tag + "order");
    expect(IsSubset(a, b) == (a - b).empty(), tag + "subset via difference");
    expect(Cardinality(a | b, u) + Cardinality(a & b, u) ==
               Cardinality(a, u) + Cardinality(b, u),
           tag + "inclusion-exclusion");

    auto w = Witness(a);
    expect(w.has_value() != a.empty() && (!w || Member(*w, a)),
           tag + "witness belongs to the set");
    for (int k = 0; k < 16; ++k) {
      HeaderPoint p = PointAt(point(rng));
      bool ia = inside(ca, p), ib = inside(cb, p), ic = inside(cc, p);
      bool ok =
          Member(p, a) == ia && Member(p, b) == ib && Member(p, c) == ic &&
          Member(p, a | b) == (ia || ib) && Member(p, a & b) == (ia && ib) &&
          Member(p, a - b) == (ia && !ib) &&
          Member(p, (a | b) - c) == ((ia || ib) && !ic) && Member(p, na) == !ia;
      expect(ok, tag + "membership consistency at " + FormatPoint(p));
    }
  }
}

void Determinism(Expect& expect) {
  std::string first;
  for (int i = 0; i < 2; ++i) {
    VerificationJob job =
        CaseStudy("policy_fixed.json", "topology_original.json");
    std::string text =
        EmitReport(Run(job, {RunMode::kFull, false}), ReportFormat::kJson);
    if (i == 0) {
      first = text;
    } else {
      expect(text == first, "machine reports are byte-identical");
    }
  }
}

struct Criterion {
  const char* id;
  const char* name;
  double limit;
  std::function<void(Expect&)> run;
};

int Main() {
  int oracle_mismatches = 0;
  std::vector<Criterion> criteria = {
      {"AC1", "shadowing regression", kLimitShadowing, Shadowing},
      {"AC2", "case-study coherence", kLimitCoherence, Coherence},
      {"AC3", "LAN example conflict and priorities", kLimitLan, LanExample},
      {"AC4", "accept directive sd4 uncovered residual at F2",
       kLimitAcceptResidual, AcceptResidual},
      {"AC5", "deny directive sd2 leak through F2 rule 2", kLimitDenyLeak,
       DenyLeak},
      {"AC6", "corrected configuration, engine and oracle", kLimitCorrected,
       Corrected},
      {"AC7", "engine equals oracle on 1000 random instances",
       kLimitEngineVersusOracle,
       [&](Expect& e) { EngineVersusOracle(e, oracle_mismatches); }},
      {"AC8", "set algebra laws on 10000 random triples", kLimitAlgebra,
       Algebra},
      {"AC9", "byte-identical machine reports", kLimitDeterminism, Determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Expect expect;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(expect);
    } catch (const std::exception& e) {
      expect(false, std::string("exception: ") + e.what());
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    bool in_time = c.limit == 0 || secs < c.limit;
    bool pass = expect.ok() && in_time;
    failed += !pass;
    std::ostringstream line;
    line << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << " ("
         << secs << " s";
    if (c.limit > 0) line << ", limit " << c.limit << " s";
    line << ")";
    if (std::string(c.id) == "AC7") {
      line << " mismatches=" << oracle_mismatches;
    }
    std::printf("%s%s%s\n", line.str().c_str(),
                in_time ? "" : "\n    runtime limit exceeded",
                expect.Summary().c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace fwcheck

int main() { return fwcheck::Main(); }
