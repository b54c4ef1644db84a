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

#include "fwcheck/report.h"

#include <sstream>

#include "fwcheck/errors.h"
#include "fwcheck/oracle.h"

namespace fwcheck {
namespace {

using nlohmann::ordered_json;

std::string JoinPath(const FirewallSequence& path) {
  if (path.empty()) return "(no firewalls)";
  std::string out;
  for (const std::string& fw : path) out += (out.empty() ? "" : " -> ") + fw;
  return out;
}

ordered_json ConflictToJson(const Conflict& c) {
  ordered_json j;
  j["elements"] = {c.first, c.second};
  j["intersection"] = SetToJson(c.overlap);
  j["witness"] = PointToJson(c.witness);
  return j;
}

FirewallPath Resolve(const FirewallTable& table, const FirewallSequence& ids) {
  FirewallPath path;
  for (const std::string& id : ids) path.push_back(std::cref(table.at(id)));
  return path;
}

// Runs the oracle on a compressed copy of the job and compares its verdict
// with the engine's for every element, then replays every violation
// witness at full scale.
OracleAgreement CrossCheck(const VerificationJob& job,
                           const EffectivePolicy& policy,
                           const ConformanceReport& conformance,
                           const std::vector<Violation>& violations) {
  DownscaledModel model = DownscaledModel::Compress(job.InputCubes());
  FirewallTable small;
  for (const auto& [id, fw] : job.firewalls)
    small.emplace(id, model.MapFirewall(fw));

  OracleAgreement agreement;
  agreement.universe = model.universe();
  for (const DirectiveCheck& check : conformance.directives) {
    const EffectiveElement* e = policy.find(check.element_id);
    std::vector<FirewallSequence> ids =
        job.topology.PathsFor(e->element.src_zone, e->element.dst_zone);
    std::vector<FirewallPath> paths;
    for (const FirewallSequence& seq : ids)
      paths.push_back(Resolve(small, seq));
    PacketSet domain = model.MapSet(e->effective_domain);
    OracleResult result =
        e->element.action == Action::kAccept
            ? OracleCheckPositive(domain, paths, model.universe())
            : OracleCheckRestrictive(domain, paths, model.universe());
    ++agreement.elements_checked;
    if (result.holds != check.success) {
      agreement.agree = false;
      agreement.mismatches.push_back(
          "element " + check.element_id + ": engine says " +
          (check.success ? "conform" : "non-conform") + ", oracle says " +
          (result.holds ? "conform" : "non-conform"));
    }
  }

  for (const Violation& v : violations) {
    bool confirmed = false;
    if (v.kind == ViolationKind::kRestrictiveLeak) {
      confirmed =
          SimulatePath(Resolve(job.firewalls, v.path), v.witness).accepted;
    } else {
      confirmed = FirstMatchAction(job.firewalls.at(v.firewall), v.witness) ==
                  Action::kDeny;
    }
    confirmed = confirmed && Member(v.witness, v.residual);
    if (!confirmed) {
      agreement.agree = false;
      agreement.mismatches.push_back("element " + v.element + ": witness " +
                                     FormatPoint(v.witness) +
                                     " does not reproduce the violation");
    }
  }
  return agreement;
}

std::string StatusName(const VerificationReport& report) {
  if (!report.coherence.coherent) return "incoherent";
  if (report.mode == RunMode::kCoherenceOnly) return "coherent";
  if (report.oracle && !report.oracle->agree) return "oracle-mismatch";
  return report.conformance && report.conformance->conform ? "conform"
                                                           : "non-conform";
}

ordered_json DirectiveToJson(const DirectiveCheck& check) {
  ordered_json j;
  j["element"] = check.element_id;
  j["directive"] = check.directive_id;
  j["kind"] = ElementKindName(check.kind);
  j["action"] = ActionName(check.action);
  j["verdict"] = check.vacuous   ? "vacuous"
                 : check.success ? "success"
                                 : "failure";
  ordered_json paths = ordered_json::array();
  for (const PathCheck& pc : check.paths) {
    ordered_json p;
    p["index"] = pc.index;
    p["path"] = pc.firewalls;
    p["verdict"] = pc.success ? "success" : "failure";
    if (check.action == Action::kAccept) {
      ordered_json fws = ordered_json::array();
      for (size_t n = 0; n < pc.positive.size(); ++n) {
        const PositiveVerdict& v = pc.positive[n];
        ordered_json f;
        f["firewall"] = pc.firewalls[n];
        f["index"] = n + 1;
        f["verdict"] = v.success ? "success" : "failure";
        if (!v.success) {
          f["kind"] = PositiveFailureName(v.cause);
          if (v.cause == PositiveFailure::kDenyRuleClash)
            f["rule"] = v.rule_order;
          f["residual"] = SetToJson(v.failure_set);
          f["witness"] = PointToJson(*v.witness);
        }
        fws.push_back(std::move(f));
      }
      p["firewalls"] = std::move(fws);
    } else if (pc.restrictive) {
      const RestrictiveVerdict& v = *pc.restrictive;
      if (v.success) {
        if (v.blocked_at > 0) {
          p["blocked_by"] = {{"firewall", pc.firewalls[v.blocked_at - 1]},
                             {"index", v.blocked_at}};
        }
      } else {
        p["leaked"] = SetToJson(v.leaked);
        p["accepting_rules"] = v.accepting_rules;
        p["via_default"] = v.leaked_via_default;
        p["witness"] = PointToJson(*v.witness);
      }
    }
    paths.push_back(std::move(p));
  }
  j["paths"] = std::move(paths);
  return j;
}

ordered_json ViolationToJson(const Violation& v) {
  ordered_json j;
  j["element"] = v.element;
  j["directive"] = v.directive;
  j["action"] = ActionName(v.action);
  j["path_index"] = v.path_index;
  j["path"] = v.path;
  j["firewall"] =
      v.firewall.empty() ? ordered_json() : ordered_json(v.firewall);
  j["firewall_index"] = v.firewall_index;
  j["kind"] = ViolationKindName(v.kind);
  j["rule"] = v.rule ? ordered_json(*v.rule) : ordered_json();
  j["residual"] = SetToJson(v.residual);
  j["witness"] = PointToJson(v.witness);
  j["hint"] = {{"class", v.hint_class}, {"text", v.hint}};
  return j;
}

}  // namespace

std::string_view ViolationKindName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDenyRuleClash:
      return "deny-rule-clash";
    case ViolationKind::kUncoveredResidual:
      return "uncovered-residual";
    case ViolationKind::kRestrictiveLeak:
      return "restrictive-leak";
  }
  return "?";
}

std::vector<Violation> CollectViolations(const ConformanceReport& report) {
  std::vector<Violation> out;
  for (const DirectiveCheck& check : report.directives) {
    for (const PathCheck& pc : check.paths) {
      if (pc.success) continue;
      Violation base;
      base.element = check.element_id;
      base.directive = check.directive_id;
      base.action = check.action;
      base.path_index = pc.index;
      base.path = pc.firewalls;
      if (check.action == Action::kAccept) {
        for (size_t n = 0; n < pc.positive.size(); ++n) {
          const PositiveVerdict& pv = pc.positive[n];
          if (pv.success) continue;
          Violation v = base;
          v.firewall = pc.firewalls[n];
          v.firewall_index = static_cast<int>(n) + 1;
          v.residual = pv.failure_set;
          v.witness = *pv.witness;
          if (pv.cause == PositiveFailure::kDenyRuleClash) {
            v.kind = ViolationKind::kDenyRuleClash;
            v.rule = pv.rule_order;
            v.hint_class = "reorder-or-remove";
            v.hint = "rule " + std::to_string(pv.rule_order) + " of " +
                     v.firewall +
                     " denies packets the policy accepts; move it below an "
                     "accept rule covering them or remove it";
          } else {
            v.kind = ViolationKind::kUncoveredResidual;
            v.hint_class = "add-accept-rule";
            v.hint = "add accept rule to " + v.firewall +
                     " covering the residual; no rule accepts it and the "
                     "default policy denies it";
          }
          out.push_back(std::move(v));
        }
      } else {
        const RestrictiveVerdict& rv = *pc.restrictive;
        Violation v = base;
        v.kind = ViolationKind::kRestrictiveLeak;
        v.residual = rv.leaked;
        v.witness = *rv.witness;
        v.hint_class = "flip-or-add-deny";
        if (pc.firewalls.empty()) {
          v.hint =
              "no firewall lies on this path; add one that denies the "
              "leaked packets";
        } else {
          v.firewall = pc.firewalls.back();
          v.firewall_index = static_cast<int>(pc.firewalls.size());
          if (!rv.accepting_rules.empty()) {
            v.rule = rv.accepting_rules.front();
            v.hint = v.firewall + " rule " + std::to_string(*v.rule) +
                     " accepts the leaked packets; change it to deny or add "
                     "a deny rule ahead of it on some firewall of the path";
          } else {
            v.hint = v.firewall +
                     " accepts the leaked packets by its default policy; add "
                     "a deny rule for them on some firewall of the path";
          }
        }
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

VerificationReport Run(const VerificationJob& job, const RunOptions& options) {
  VerificationReport report;
  report.mode = options.mode;
  EffectivePolicy policy = EffectiveDomains(job.elements, job.priorities);
  report.coherence = CheckCoherence(policy);
  if (options.mode == RunMode::kCoherenceOnly || !report.coherence.coherent) {
    return report;
  }
  report.conformance = CheckConformance(policy, job.firewalls, job.topology);
  report.warnings = report.conformance->warnings;
  report.violations = CollectViolations(*report.conformance);
  if (options.with_oracle) {
    report.oracle =
        CrossCheck(job, policy, *report.conformance, report.violations);
  }
  return report;
}

int ExitCode(const VerificationReport& report) {
  if (!report.coherence.coherent) return kExitIncoherent;
  if (report.mode == RunMode::kCoherenceOnly) return kExitOk;
  if (report.oracle && !report.oracle->agree) return kExitOracleMismatch;
  if (!report.conformance || !report.conformance->conform)
    return kExitViolations;
  return kExitOk;
}

ordered_json CubeToJson(const HeaderCube& cube) {
  ordered_json j;
  j["src"] = FormatAddressRange(cube.src);
  j["dst"] = FormatAddressRange(cube.dst);
  ordered_json protocols = ordered_json::array();
  for (Protocol p : kAllProtocols) {
    if (cube.protocols.contains(p)) protocols.push_back(ProtocolName(p));
  }
  j["protocols"] = std::move(protocols);
  j["ports"] = FormatPortRange(cube.ports);
  return j;
}

HeaderCube CubeFromJson(const ordered_json& j) {
  HeaderCube cube;
  cube.src = ParseAddressRange(j.at("src").get<std::string>(), "src");
  cube.dst = ParseAddressRange(j.at("dst").get<std::string>(), "dst");
  cube.protocols = ProtocolSet();
  for (const auto& p : j.at("protocols")) {
    cube.protocols =
        cube.protocols | ParseProtocolSet(p.get<std::string>(), "protocols");
  }
  cube.ports = ParsePortRange(j.at("ports").get<std::string>(), "ports");
  return cube;
}

ordered_json SetToJson(const PacketSet& set) {
  ordered_json j = ordered_json::array();
  for (const HeaderCube& c : set.cubes()) j.push_back(CubeToJson(c));
  return j;
}

PacketSet SetFromJson(const ordered_json& j) {
  std::vector<HeaderCube> cubes;
  for (const auto& c : j) cubes.push_back(CubeFromJson(c));
  return PacketSet::FromCubes(cubes);
}

ordered_json PointToJson(const HeaderPoint& p) {
  ordered_json j;
  j["src"] = FormatAddress(p.src_ip);
  j["dst"] = FormatAddress(p.dst_ip);
  j["protocol"] = ProtocolName(p.protocol);
  j["port"] = p.dst_port;
  return j;
}

ordered_json ToJson(const VerificationReport& report) {
  ordered_json j;
  j["mode"] = report.mode == RunMode::kCoherenceOnly ? "coherence" : "verify";
  j["status"] = StatusName(report);
  j["exit_code"] = ExitCode(report);

  ordered_json coherence;
  coherence["coherent"] = report.coherence.coherent;
  ordered_json conflicts = ordered_json::array();
  for (const Conflict& c : report.coherence.conflicts) {
    conflicts.push_back(ConflictToJson(c));
  }
  coherence["conflicts"] = std::move(conflicts);
  j["coherence"] = std::move(coherence);

  if (report.conformance) {
    ordered_json conformance;
    conformance["conform"] = report.conformance->conform;
    ordered_json directives = ordered_json::array();
    for (const DirectiveCheck& d : report.conformance->directives) {
      directives.push_back(DirectiveToJson(d));
    }
    conformance["directives"] = std::move(directives);
    ordered_json violations = ordered_json::array();
    for (const Violation& v : report.violations) {
      violations.push_back(ViolationToJson(v));
    }
    conformance["violations"] = std::move(violations);
    j["conformance"] = std::move(conformance);
  }

  if (report.oracle) {
    const OracleAgreement& o = *report.oracle;
    ordered_json oracle;
    oracle["agree"] = o.agree;
    oracle["elements_checked"] = o.elements_checked;
    oracle["universe"] = {{"src_bits", o.universe.src_bits},
                          {"dst_bits", o.universe.dst_bits},
                          {"protocols", o.universe.protocols.size()},
                          {"port_bits", o.universe.port_bits}};
    oracle["mismatches"] = o.mismatches;
    j["oracle"] = std::move(oracle);
  }
  j["warnings"] = report.warnings;
  return j;
}

std::string EmitReport(const VerificationReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return ToJson(report).dump(2) + "\n";

  std::ostringstream out;
  if (report.coherence.coherent) {
    out << "COHERENT\n";
  } else {
    out << "INCOHERENT\n";
    for (const Conflict& c : report.coherence.conflicts) {
      out << "\nconflict: " << c.first << " x " << c.second << "\n"
          << "  witness: " << FormatPoint(c.witness) << "\n";
      for (const HeaderCube& cube : c.overlap.cubes()) {
        out << "  overlap: " << FormatCube(cube) << "\n";
      }
      out << "  hint: declare which element takes priority\n";
    }
  }

  if (report.conformance) {
    out << (report.conformance->conform ? "CONFORM" : "NON-CONFORM") << "\n";
    for (const Violation& v : report.violations) {
      out << "\nviolation: element " << v.element << " ("
          << ActionName(v.action) << ", directive " << v.directive << ")\n"
          << "  path " << v.path_index << ": " << JoinPath(v.path) << "\n";
      if (!v.firewall.empty()) {
        out << "  firewall: " << v.firewall << " (#" << v.firewall_index
            << ")\n";
      }
      out << "  kind: " << ViolationKindName(v.kind) << "\n";
      if (v.rule) out << "  rule: " << *v.rule << "\n";
      out << "  witness: " << FormatPoint(v.witness) << "\n";
      for (const HeaderCube& cube : v.residual.cubes()) {
        out << "  residual: " << FormatCube(cube) << "\n";
      }
      out << "  hint: " << v.hint_class << ": " << v.hint << "\n";
    }
  }

  if (report.oracle) {
    out << "\noracle: " << (report.oracle->agree ? "agrees" : "DISAGREES")
        << " (" << report.oracle->elements_checked << " elements)\n";
    for (const std::string& m : report.oracle->mismatches) {
      out << "  mismatch: " << m << "\n";
    }
  }
  if (!report.warnings.empty()) out << "\n";
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace fwcheck
