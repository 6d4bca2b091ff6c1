#include "testbed/netcheck/netcheck.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace testbed::netcheck {

namespace {

struct Device {
  const model::RouterSpec* spec;
  const model::FirewallSpec* firewall;  // null for plain routers
};

std::vector<Device> devices(const model::TestbedConfig& cfg) {
  std::vector<Device> out;
  for (const auto& r : cfg.routers) out.push_back({&r, nullptr});
  for (const auto& f : cfg.firewalls) out.push_back({&f, &f});
  return out;
}

std::optional<Device> find_device(const model::TestbedConfig& cfg, std::string_view name) {
  for (const auto& d : devices(cfg))
    if (d.spec->name == name) return d;
  return std::nullopt;
}

// Most specific VLAN containing `ip`.
const model::VlanSpec* vlan_of(const model::TestbedConfig& cfg, Ipv4Addr ip) {
  const model::VlanSpec* best = nullptr;
  for (const auto& v : cfg.vlans)
    if (v.cidr.contains(ip) && (!best || v.cidr.length() > best->cidr.length())) best = &v;
  return best;
}

std::string endpoint_name(const model::TestbedConfig& cfg, Ipv4Addr ip) {
  for (const auto& h : cfg.hosts)
    for (const auto& n : h.nics)
      if (n.ip == ip) return h.name;
  return ip.to_string();
}

bool rule_matches(const model::FirewallRule& rule, Ipv4Addr src, Ipv4Addr dst, model::RuleProto proto,
                  std::optional<std::uint16_t> port) {
  if (!rule.src.contains(src) || !rule.dst.contains(dst)) return false;
  if (rule.proto != model::RuleProto::Any && rule.proto != proto) return false;
  if (rule.dst_port && (!port || !rule.dst_port->contains(*port))) return false;
  return true;
}

bool firewall_allows(const model::FirewallSpec& fw, Ipv4Addr src, Ipv4Addr dst, model::RuleProto proto,
                     std::optional<std::uint16_t> port) {
  std::vector<const model::FirewallRule*> rules;
  for (const auto& r : fw.rules) rules.push_back(&r);
  std::stable_sort(rules.begin(), rules.end(), [](auto* a, auto* b) { return a->order < b->order; });
  for (const auto* r : rules)
    if (rule_matches(*r, src, dst, proto, port)) return r->action == model::RuleAction::Allow;
  return false;
}

}  // namespace

RouteDecision resolve_route(const model::RouterSpec& router, const model::TestbedConfig& cfg, Ipv4Addr dst) {
  RouteDecision best;
  for (const auto& iface : router.interfaces) {
    const auto* v = cfg.find_vlan(iface.vlan);
    if (!v || !v->cidr.contains(dst) || v->cidr.length() <= best.prefix_len) continue;
    best = {RouteDecision::Via::Connected, v->name, {}, v->cidr.length()};
  }
  for (const auto& route : router.static_routes) {
    // Strictly longer: connected routes keep equal-length ties.
    if (!route.prefix.contains(dst) || route.prefix.length() <= best.prefix_len) continue;
    best = {RouteDecision::Via::StaticNextHop, "", route.via, route.prefix.length()};
  }
  return best;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Reachable: return "Reachable";
    case Verdict::NoRoute: return "NoRoute";
    case Verdict::FirewallDenied: return "FirewallDenied";
    case Verdict::Loop: return "Loop";
  }
  return "?";
}

std::optional<std::string> gateway_device(const model::TestbedConfig& cfg, std::string_view vlan) {
  const auto* v = cfg.find_vlan(vlan);
  if (!v) return std::nullopt;
  std::optional<std::string> best;
  std::optional<Ipv4Addr> best_ip;
  for (const auto& d : devices(cfg)) {
    for (const auto& iface : d.spec->interfaces) {
      if (iface.vlan != vlan) continue;
      if (v->gateway) {
        if (iface.ip == *v->gateway) return d.spec->name;
      } else if (!best_ip || iface.ip < *best_ip) {
        best_ip = iface.ip;
        best = d.spec->name;
      }
    }
  }
  return v->gateway ? std::nullopt : best;
}

Path trace_path(const model::TestbedConfig& cfg, Ipv4Addr src, Ipv4Addr dst, model::RuleProto proto,
                std::optional<std::uint16_t> dst_port) {
  const auto* src_vlan = vlan_of(cfg, src);
  if (!src_vlan) throw UnknownSource(src);

  Path path;
  path.hops.push_back({endpoint_name(cfg, src), std::nullopt, src_vlan->name});
  auto deliver = [&](const std::string& vlan) {
    path.hops.push_back({endpoint_name(cfg, dst), vlan, std::nullopt});
    path.verdict = Verdict::Reachable;
    return path;
  };

  if (src_vlan->cidr.contains(dst)) return deliver(src_vlan->name);

  auto gw = gateway_device(cfg, src_vlan->name);
  if (!gw) {
    path.verdict = Verdict::NoRoute;
    return path;
  }

  std::string device = *gw;
  std::string ingress = src_vlan->name;
  std::set<std::pair<std::string, std::string>> seen;

  for (int step = 0; step < kHopLimit; ++step) {
    const auto dev = find_device(cfg, device);
    const auto decision = resolve_route(*dev->spec, cfg, dst);
    Hop hop{device, ingress, std::nullopt};

    std::string egress;
    std::optional<std::string> next_device;
    if (decision.via == RouteDecision::Via::Connected) {
      egress = decision.vlan;
    } else if (decision.via == RouteDecision::Via::StaticNextHop) {
      // Egress is the connected vlan holding the next hop; the next device owns that address.
      for (const auto& iface : dev->spec->interfaces) {
        const auto* v = cfg.find_vlan(iface.vlan);
        if (v && v->cidr.contains(decision.next_hop)) egress = v->name;
      }
      if (!egress.empty())
        for (const auto& d : devices(cfg))
          for (const auto& iface : d.spec->interfaces)
            if (iface.vlan == egress && iface.ip == decision.next_hop) next_device = d.spec->name;
    }

    if (egress.empty() || (decision.via == RouteDecision::Via::StaticNextHop && !next_device)) {
      if (!egress.empty()) hop.egress_vlan = egress;
      path.hops.push_back(std::move(hop));
      path.verdict = Verdict::NoRoute;
      return path;
    }

    hop.egress_vlan = egress;
    path.hops.push_back(hop);

    if (dev->firewall && !firewall_allows(*dev->firewall, src, dst, proto, dst_port)) {
      path.verdict = Verdict::FirewallDenied;
      return path;
    }
    if (!seen.insert({device, egress}).second) {
      path.verdict = Verdict::Loop;
      return path;
    }
    if (decision.via == RouteDecision::Via::Connected) return deliver(egress);

    device = *next_device;
    ingress = egress;
  }
  path.verdict = Verdict::NoRoute;  // hop limit
  return path;
}

std::vector<std::vector<Verdict>> reachability_matrix(const model::TestbedConfig& cfg,
                                                      std::span<const Ipv4Addr> endpoints, model::RuleProto proto,
                                                      std::optional<std::uint16_t> dst_port) {
  if (endpoints.size() > kMaxMatrixEndpoints)
    throw std::invalid_argument("reachability matrix is limited to " + std::to_string(kMaxMatrixEndpoints) +
                                " endpoints");
  std::vector<std::vector<Verdict>> m(endpoints.size(), std::vector<Verdict>(endpoints.size()));
  for (std::size_t i = 0; i < endpoints.size(); ++i)
    for (std::size_t j = 0; j < endpoints.size(); ++j)
      m[i][j] = trace_path(cfg, endpoints[i], endpoints[j], proto, dst_port).verdict;
  return m;
}

nlohmann::ordered_json to_json(Ipv4Addr src, Ipv4Addr dst, const Path& path) {
  using nlohmann::ordered_json;
  ordered_json j{{"src", src.to_string()}, {"dst", dst.to_string()}, {"verdict", to_string(path.verdict)}};
  j["hops"] = ordered_json::array();
  for (const auto& h : path.hops)
    j["hops"].push_back({{"device", h.device},
                         {"ingress_vlan", h.ingress_vlan ? ordered_json(*h.ingress_vlan) : ordered_json(nullptr)},
                         {"egress_vlan", h.egress_vlan ? ordered_json(*h.egress_vlan) : ordered_json(nullptr)}});
  return j;
}

}  // namespace testbed::netcheck
