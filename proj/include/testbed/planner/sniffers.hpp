#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "testbed/model/config.hpp"

namespace testbed::planner {

/// One SPAN mirror: every VM nic of `vlan` on the sniffer's node is copied
/// to `output_port`, an interface of the sniffer VM.
struct Tap {
  std::string vlan;
  std::vector<std::string> mirror_sources;  // "<host>:eth<N>"
  std::string output_port;

  friend bool operator==(const Tap&, const Tap&) = default;
};

struct Sniffer {
  model::NodeId node;
  model::BridgeId bridge;
  std::string name;
  std::vector<Tap> taps;

  friend bool operator==(const Sniffer&, const Sniffer&) = default;
};

struct SnifferPlan {
  std::vector<Sniffer> sniffers;
};

/// Identifier used for a host nic in mirror source lists.
std::string nic_id(const model::HostSpec& host, std::size_t index);

/// One sniffer per (node, bridge) pair that hosts at least one VM nic, with
/// one tap per VLAN present there. Router and firewall interfaces are not
/// mirror sources; hosts without a node are not placed. Sniffers are ordered
/// by node (first appearance in host order) then bridge declaration order.
SnifferPlan plan_sniffers(const model::TestbedConfig& cfg);

nlohmann::ordered_json to_json(const SnifferPlan& plan);

}  // namespace testbed::planner
