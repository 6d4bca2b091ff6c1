#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "testbed/model/config.hpp"

namespace testbed::netcheck {

struct RouteDecision {
  enum class Via { Connected, StaticNextHop, None };

  Via via = Via::None;
  std::string vlan;  // Connected
  Ipv4Addr next_hop;  // StaticNextHop
  int prefix_len = -1;

  friend bool operator==(const RouteDecision&, const RouteDecision&) = default;
};

/// Longest-prefix match over the router's connected VLAN networks and its
/// static routes. A connected network wins a tie at equal prefix length.
RouteDecision resolve_route(const model::RouterSpec& router, const model::TestbedConfig& cfg, Ipv4Addr dst);

enum class Verdict { Reachable, NoRoute, FirewallDenied, Loop };

std::string_view to_string(Verdict v);

struct Hop {
  std::string device;
  std::optional<std::string> ingress_vlan;
  std::optional<std::string> egress_vlan;

  friend bool operator==(const Hop&, const Hop&) = default;
};

struct Path {
  std::vector<Hop> hops;
  Verdict verdict = Verdict::NoRoute;
};

class UnknownSource : public Error {
 public:
  explicit UnknownSource(Ipv4Addr src) : Error(ErrorKind::Domain, "source " + src.to_string() + " is in no vlan") {}
};

constexpr int kHopLimit = 32;

/// The router or firewall acting as default gateway on `vlan`: the VLAN's
/// gateway override when set, else the device interface with the lowest IP.
std::optional<std::string> gateway_device(const model::TestbedConfig& cfg, std::string_view vlan);

/// Stateless hop-by-hop L3 trace. The first hop is the source endpoint and,
/// when reachable, the last hop is the destination endpoint. Firewalls apply
/// their rules first-match by order with default Deny; a rule carrying a port
/// range only matches queries that carry a port.
Path trace_path(const model::TestbedConfig& cfg, Ipv4Addr src, Ipv4Addr dst, model::RuleProto proto,
                std::optional<std::uint16_t> dst_port);

constexpr std::size_t kMaxMatrixEndpoints = 64;

/// matrix[i][j] = trace_path(endpoints[i], endpoints[j]).verdict.
std::vector<std::vector<Verdict>> reachability_matrix(const model::TestbedConfig& cfg,
                                                      std::span<const Ipv4Addr> endpoints,
                                                      model::RuleProto proto = model::RuleProto::Any,
                                                      std::optional<std::uint16_t> dst_port = std::nullopt);

nlohmann::ordered_json to_json(Ipv4Addr src, Ipv4Addr dst, const Path& path);

}  // namespace testbed::netcheck
