#include "testbed/planner/plan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "testbed/model/validate.hpp"
#include "testbed/planner/sniffers.hpp"

namespace testbed::planner {

using nlohmann::ordered_json;

model::TestbedConfig assign_nodes(model::TestbedConfig cfg, std::span<const model::NodeId> nodes) {
  if (nodes.empty()) throw NoNodes();
  std::size_t cursor = 0;
  for (auto& host : cfg.hosts) {
    if (host.node) continue;
    host.node = nodes[cursor % nodes.size()];
    ++cursor;
  }
  return cfg;
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::CreateBridge: return "CreateBridge";
    case StepKind::CreateVlan: return "CreateVlan";
    case StepKind::CreateRouter: return "CreateRouter";
    case StepKind::CreateFirewall: return "CreateFirewall";
    case StepKind::InstantiateHost: return "InstantiateHost";
    case StepKind::AttachMirror: return "AttachMirror";
  }
  return "?";
}

namespace {

ordered_json attachments_json(const std::vector<model::Attachment>& list) {
  auto out = ordered_json::array();
  for (const auto& a : list) out.push_back({{"vlan", a.vlan}, {"ip", a.ip.to_string()}});
  return out;
}

ordered_json router_payload(const model::RouterSpec& r) {
  ordered_json p;
  p["interfaces"] = attachments_json(r.interfaces);
  p["static_routes"] = ordered_json::array();
  for (const auto& s : r.static_routes)
    p["static_routes"].push_back({{"prefix", s.prefix.to_string()}, {"via", s.via.to_string()}});
  return p;
}

class Builder {
 public:
  std::size_t add(StepKind kind, std::string target, std::vector<std::size_t> deps, ordered_json payload) {
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    plan_.steps.push_back({kind, target, std::move(deps), std::move(payload)});
    index_[{kind, std::move(target)}] = plan_.steps.size() - 1;
    return plan_.steps.size() - 1;
  }

  std::size_t index(StepKind kind, const std::string& target) const { return index_.at({kind, target}); }

  DeploymentPlan take() { return std::move(plan_); }

 private:
  DeploymentPlan plan_;
  std::map<std::pair<StepKind, std::string>, std::size_t> index_;
};

}  // namespace

DeploymentPlan emit_deployment_plan(const model::TestbedConfig& cfg) {
  auto violations = model::validate_config(cfg);
  if (model::has_errors(violations)) throw model::ValidationFailed(std::move(violations));

  Builder b;
  for (const auto& bridge : cfg.bridges) b.add(StepKind::CreateBridge, bridge, {}, ordered_json::object());

  for (const auto& v : cfg.vlans) {
    ordered_json p{{"cidr", v.cidr.to_string()}, {"bridge", v.bridge}};
    if (v.gateway) p["gateway"] = v.gateway->to_string();
    b.add(StepKind::CreateVlan, v.name, {b.index(StepKind::CreateBridge, v.bridge)}, std::move(p));
  }

  auto vlan_deps = [&](const std::vector<model::Attachment>& list) {
    std::vector<std::size_t> deps;
    for (const auto& a : list) deps.push_back(b.index(StepKind::CreateVlan, a.vlan));
    return deps;
  };

  for (const auto& r : cfg.routers) b.add(StepKind::CreateRouter, r.name, vlan_deps(r.interfaces), router_payload(r));

  for (const auto& f : cfg.firewalls) {
    auto p = router_payload(f);
    p["rules"] = ordered_json::array();
    for (const auto& rule : f.rules) {
      ordered_json j{{"order", rule.order},
                     {"action", model::to_string(rule.action)},
                     {"src", rule.src.to_string()},
                     {"dst", rule.dst.to_string()},
                     {"proto", model::to_string(rule.proto)}};
      if (rule.dst_port) j["dst_port"] = {{"low", rule.dst_port->low}, {"high", rule.dst_port->high}};
      p["rules"].push_back(std::move(j));
    }
    b.add(StepKind::CreateFirewall, f.name, vlan_deps(f.interfaces), std::move(p));
  }

  for (const auto& h : cfg.hosts) {
    ordered_json p{{"template", h.template_id}, {"node", h.node ? ordered_json(*h.node) : ordered_json(nullptr)}};
    p["nics"] = attachments_json(h.nics);
    p["packages"] = ordered_json::array();
    for (const auto& pkg : h.packages) p["packages"].push_back({{"name", pkg.name}, {"version", pkg.version}});
    p["agent_profile"] = h.agent_profile ? ordered_json(*h.agent_profile) : ordered_json(nullptr);
    b.add(StepKind::InstantiateHost, h.name, vlan_deps(h.nics), std::move(p));
  }

  for (const auto& s : plan_sniffers(cfg).sniffers) {
    std::vector<std::size_t> deps{b.index(StepKind::CreateBridge, s.bridge)};
    ordered_json p{{"node", s.node}, {"bridge", s.bridge}, {"taps", ordered_json::array()}};
    for (const auto& t : s.taps) {
      deps.push_back(b.index(StepKind::CreateVlan, t.vlan));
      for (const auto& src : t.mirror_sources)
        deps.push_back(b.index(StepKind::InstantiateHost, src.substr(0, src.rfind(':'))));
      p["taps"].push_back({{"vlan", t.vlan}, {"mirror_sources", t.mirror_sources}, {"output_port", t.output_port}});
    }
    b.add(StepKind::AttachMirror, s.name, std::move(deps), std::move(p));
  }
  return b.take();
}

ordered_json to_json(const DeploymentPlan& plan) {
  auto out = ordered_json::array();
  for (const auto& s : plan.steps)
    out.push_back({{"kind", to_string(s.kind)}, {"target", s.target}, {"depends_on", s.depends_on}, {"payload", s.payload}});
  return out;
}

std::vector<std::string> dry_run(const DeploymentPlan& plan) {
  std::set<std::string> bridges, vlans, hosts, devices;
  std::vector<std::string> problems;

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const auto& p = step.payload;
    auto complain = [&](const std::string& what) {
      problems.push_back("step " + std::to_string(i) + " (" + std::string(to_string(step.kind)) + " " + step.target +
                         "): " + what);
    };
    auto need = [&](const std::set<std::string>& table, const ordered_json& name, const char* what) {
      if (!name.is_string() || !table.count(name.get<std::string>()))
        complain(std::string("unknown ") + what + " " + name.dump());
    };
    auto need_nics = [&](const ordered_json& list) {
      if (!list.is_array()) return complain("missing interface list");
      for (const auto& a : list) need(vlans, a.value("vlan", ordered_json()), "vlan");
    };

    for (auto d : step.depends_on)
      if (d >= i) complain("depends on step " + std::to_string(d) + " which does not precede it");

    switch (step.kind) {
      case StepKind::CreateBridge:
        bridges.insert(step.target);
        break;
      case StepKind::CreateVlan:
        need(bridges, p.value("bridge", ordered_json()), "bridge");
        vlans.insert(step.target);
        break;
      case StepKind::CreateRouter:
      case StepKind::CreateFirewall:
        need_nics(p.value("interfaces", ordered_json()));
        devices.insert(step.target);
        break;
      case StepKind::InstantiateHost:
        need_nics(p.value("nics", ordered_json()));
        hosts.insert(step.target);
        break;
      case StepKind::AttachMirror:
        need(bridges, p.value("bridge", ordered_json()), "bridge");
        for (const auto& t : p.value("taps", ordered_json::array())) {
          need(vlans, t.value("vlan", ordered_json()), "vlan");
          for (const auto& src : t.value("mirror_sources", ordered_json::array())) {
            auto id = src.is_string() ? src.get<std::string>() : std::string();
            need(hosts, ordered_json(id.substr(0, id.rfind(':'))), "host");
          }
        }
        break;
    }
  }
  return problems;
}

}  // namespace testbed::planner
