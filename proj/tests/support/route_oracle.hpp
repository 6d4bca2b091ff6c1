#pragma once

// Reference forwarding walk: brute-force longest-prefix match and a plain
// first-match firewall scan, with a visited set standing in for loop checks.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "testbed/model/config.hpp"

namespace testsupport {

struct OracleRoute {
  int len = -1;
  bool connected = false;
  std::string vlan;      // connected
  std::uint32_t via = 0;  // static
};

inline std::uint32_t mask_of(int len) { return len == 0 ? 0u : ~0u << (32 - len); }

inline bool in_prefix(std::uint32_t net, int len, std::uint32_t ip) { return (ip & mask_of(len)) == (net & mask_of(len)); }

inline OracleRoute oracle_lpm(const testbed::model::RouterSpec& r, const testbed::model::TestbedConfig& cfg,
                              std::uint32_t dst) {
  OracleRoute best;
  for (const auto& a : r.interfaces) {
    const auto* v = cfg.find_vlan(a.vlan);
    if (!v) continue;
    const int len = v->cidr.length();
    if (!in_prefix(v->cidr.address().value(), len, dst)) continue;
    if (len > best.len || (len == best.len && !best.connected)) best = {len, true, v->name, 0};
  }
  for (const auto& s : r.static_routes) {
    const int len = s.prefix.length();
    if (!in_prefix(s.prefix.address().value(), len, dst)) continue;
    if (len > best.len) best = {len, false, "", s.via.value()};
  }
  return best;
}

enum class OracleVerdict { Reachable, Unreachable };

inline std::vector<const testbed::model::RouterSpec*> all_devices(const testbed::model::TestbedConfig& cfg) {
  std::vector<const testbed::model::RouterSpec*> out;
  for (const auto& r : cfg.routers) out.push_back(&r);
  for (const auto& f : cfg.firewalls) out.push_back(&f);
  return out;
}

inline const testbed::model::FirewallSpec* as_firewall(const testbed::model::TestbedConfig& cfg,
                                                      const testbed::model::RouterSpec* d) {
  for (const auto& f : cfg.firewalls)
    if (&f == d) return &f;
  return nullptr;
}

inline std::optional<std::string> vlan_of(const testbed::model::TestbedConfig& cfg, std::uint32_t ip) {
  std::optional<std::string> best;
  int best_len = -1;
  for (const auto& v : cfg.vlans)
    if (in_prefix(v.cidr.address().value(), v.cidr.length(), ip) && v.cidr.length() > best_len) {
      best = v.name;
      best_len = v.cidr.length();
    }
  return best;
}

/// Lowest device address on the vlan, unless overridden.
inline const testbed::model::RouterSpec* oracle_gateway(const testbed::model::TestbedConfig& cfg,
                                                       const std::string& vlan) {
  const testbed::model::RouterSpec* best = nullptr;
  std::uint32_t best_ip = 0;
  const auto* v = cfg.find_vlan(vlan);
  for (const auto* d : all_devices(cfg))
    for (const auto& a : d->interfaces) {
      if (a.vlan != vlan) continue;
      if (v && v->gateway) {
        if (a.ip == *v->gateway) return d;
        continue;
      }
      if (!best || a.ip.value() < best_ip) {
        best = d;
        best_ip = a.ip.value();
      }
    }
  return best;
}

/// Forwarding verdict with proto Any and no port.
inline OracleVerdict oracle_reach(const testbed::model::TestbedConfig& cfg, std::uint32_t src, std::uint32_t dst) {
  const auto src_vlan = vlan_of(cfg, src);
  const auto dst_vlan = vlan_of(cfg, dst);
  if (!src_vlan) return OracleVerdict::Unreachable;
  if (dst_vlan && *dst_vlan == *src_vlan) return OracleVerdict::Reachable;
  const auto* dev = oracle_gateway(cfg, *src_vlan);
  std::set<const void*> seen;
  while (dev) {
    if (!seen.insert(dev).second) return OracleVerdict::Unreachable;
    if (const auto* fw = as_firewall(cfg, dev)) {
      auto rules = fw->rules;
      std::sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
      bool allow = false;
      for (const auto& r : rules) {
        if (r.dst_port) continue;  // port-qualified rules never match a portless query
        if (r.proto != testbed::model::RuleProto::Any) continue;
        if (!in_prefix(r.src.address().value(), r.src.length(), src)) continue;
        if (!in_prefix(r.dst.address().value(), r.dst.length(), dst)) continue;
        allow = r.action == testbed::model::RuleAction::Allow;
        break;
      }
      if (!allow) return OracleVerdict::Unreachable;
    }
    const auto route = oracle_lpm(*dev, cfg, dst);
    if (route.len < 0) return OracleVerdict::Unreachable;
    if (route.connected) return OracleVerdict::Reachable;
    const testbed::model::RouterSpec* next = nullptr;
    for (const auto* d : all_devices(cfg))
      for (const auto& a : d->interfaces)
        if (a.ip.value() == route.via) next = d;
    dev = next;
  }
  return OracleVerdict::Unreachable;
}

}  // namespace testsupport
