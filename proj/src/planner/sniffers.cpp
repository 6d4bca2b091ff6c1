#include "testbed/planner/sniffers.hpp"

#include <algorithm>
#include <map>

namespace testbed::planner {

std::string nic_id(const model::HostSpec& host, std::size_t index) {
  return host.name + ":eth" + std::to_string(index);
}

SnifferPlan plan_sniffers(const model::TestbedConfig& cfg) {
  std::vector<model::NodeId> node_order;
  for (const auto& h : cfg.hosts)
    if (h.node && std::find(node_order.begin(), node_order.end(), *h.node) == node_order.end())
      node_order.push_back(*h.node);

  auto bridge_rank = [&](const std::string& bridge) {
    return static_cast<std::size_t>(std::find(cfg.bridges.begin(), cfg.bridges.end(), bridge) - cfg.bridges.begin());
  };
  auto vlan_rank = [&](const std::string& vlan) {
    auto it = std::find_if(cfg.vlans.begin(), cfg.vlans.end(), [&](const model::VlanSpec& v) { return v.name == vlan; });
    return static_cast<std::size_t>(it - cfg.vlans.begin());
  };
  auto node_rank = [&](const std::string& node) {
    return static_cast<std::size_t>(std::find(node_order.begin(), node_order.end(), node) - node_order.begin());
  };

  // (node rank, bridge rank) -> vlan rank -> sources
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, std::vector<std::string>>> groups;
  for (const auto& h : cfg.hosts) {
    if (!h.node) continue;
    for (std::size_t i = 0; i < h.nics.size(); ++i) {
      const auto* vlan = cfg.find_vlan(h.nics[i].vlan);
      if (!vlan) continue;  // dangling reference; validation reports it
      groups[{node_rank(*h.node), bridge_rank(vlan->bridge)}][vlan_rank(vlan->name)].push_back(nic_id(h, i));
    }
  }

  SnifferPlan plan;
  for (auto& [key, taps] : groups) {
    Sniffer s;
    s.node = node_order[key.first];
    s.bridge = key.second < cfg.bridges.size() ? cfg.bridges[key.second] : std::string("?");
    s.name = "sniffer-" + s.node + "-" + s.bridge;
    for (auto& [rank, sources] : taps) {
      const auto& vlan = cfg.vlans[rank].name;
      s.taps.push_back({vlan, std::move(sources), s.name + ":" + vlan});
    }
    plan.sniffers.push_back(std::move(s));
  }
  return plan;
}

nlohmann::ordered_json to_json(const SnifferPlan& plan) {
  nlohmann::ordered_json out;
  out["sniffers"] = nlohmann::ordered_json::array();
  for (const auto& s : plan.sniffers) {
    nlohmann::ordered_json j{{"node", s.node}, {"bridge", s.bridge}, {"name", s.name}};
    j["taps"] = nlohmann::ordered_json::array();
    for (const auto& t : s.taps)
      j["taps"].push_back({{"vlan", t.vlan}, {"mirror_sources", t.mirror_sources}, {"output_port", t.output_port}});
    out["sniffers"].push_back(std::move(j));
  }
  return out;
}

}  // namespace testbed::planner
