#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/error.hpp"
#include "testbed/common/ipv4.hpp"
#include "testbed/scanmerge/cpe.hpp"

namespace testbed::model {

using BridgeId = std::string;
using TemplateId = std::string;
using NodeId = std::string;

struct VlanSpec {
  std::string name;
  Ipv4Prefix cidr;
  BridgeId bridge;
  // Overrides the default gateway (lowest router/firewall address on the VLAN).
  std::optional<Ipv4Addr> gateway;

  friend bool operator==(const VlanSpec&, const VlanSpec&) = default;
};

struct Attachment {
  std::string vlan;
  Ipv4Addr ip;

  friend bool operator==(const Attachment&, const Attachment&) = default;
};

struct StaticRoute {
  Ipv4Prefix prefix;
  Ipv4Addr via;

  friend bool operator==(const StaticRoute&, const StaticRoute&) = default;
};

struct RouterSpec {
  std::string name;
  std::vector<Attachment> interfaces;
  std::vector<StaticRoute> static_routes;

  friend bool operator==(const RouterSpec&, const RouterSpec&) = default;
};

enum class RuleAction { Allow, Deny };
enum class RuleProto { TCP, UDP, Any };

struct PortRange {
  std::uint16_t low = 1;
  std::uint16_t high = 65535;

  constexpr bool contains(std::uint16_t port) const { return low <= port && port <= high; }
  friend bool operator==(const PortRange&, const PortRange&) = default;
};

struct FirewallRule {
  int order = 0;
  RuleAction action = RuleAction::Deny;
  Ipv4Prefix src;
  Ipv4Prefix dst;
  RuleProto proto = RuleProto::Any;
  std::optional<PortRange> dst_port;

  friend bool operator==(const FirewallRule&, const FirewallRule&) = default;
};

/// A firewall routes like a router and additionally filters what it forwards.
struct FirewallSpec : RouterSpec {
  std::vector<FirewallRule> rules;

  friend bool operator==(const FirewallSpec&, const FirewallSpec&) = default;
};

struct PackageSpec {
  std::string name;
  std::string version;
  std::optional<scanmerge::CpeUri> origin_cpe;

  friend bool operator==(const PackageSpec&, const PackageSpec&) = default;
};

struct HostSpec {
  std::string name;
  TemplateId template_id;
  std::vector<Attachment> nics;
  std::vector<PackageSpec> packages;
  std::optional<std::string> agent_profile;
  std::optional<NodeId> node;

  friend bool operator==(const HostSpec&, const HostSpec&) = default;
};

struct TemplateSpec {
  TemplateId id;
  std::string os;
  std::string family;
  std::optional<std::string> generation;

  friend bool operator==(const TemplateSpec&, const TemplateSpec&) = default;
};

struct TestbedConfig {
  std::vector<BridgeId> bridges;
  std::vector<VlanSpec> vlans;
  std::vector<RouterSpec> routers;
  std::vector<FirewallSpec> firewalls;
  std::vector<HostSpec> hosts;
  std::vector<TemplateSpec> templates;

  const VlanSpec* find_vlan(std::string_view name) const;
  const HostSpec* find_host(std::string_view name) const;
  const TemplateSpec* find_template(std::string_view id) const;

  friend bool operator==(const TestbedConfig&, const TestbedConfig&) = default;
};

std::string_view to_string(RuleAction action);
std::string_view to_string(RuleProto proto);

class ConfigSyntaxError : public SyntaxError {
 public:
  ConfigSyntaxError(std::string path, const std::string& what)
      : SyntaxError((path.empty() ? std::string("config") : path) + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Parses the JSON config document. Checks syntax, types and name
/// uniqueness of VLANs; semantic rules are left to validate_config.
TestbedConfig load_config(std::string_view document);

/// Canonical JSON rendering (2-space indent, fixed key order, trailing LF).
std::string save_config(const TestbedConfig& cfg);

}  // namespace testbed::model
