#include "testbed/model/validate.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace testbed::model {

namespace {

std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

class Checker {
 public:
  explicit Checker(const TestbedConfig& cfg) : cfg_(cfg) {}

  std::vector<Violation> run() {
    check_bridges();
    check_vlans();
    check_templates();
    for (std::size_t i = 0; i < cfg_.routers.size(); ++i) check_device(cfg_.routers[i], indexed("routers", i));
    for (std::size_t i = 0; i < cfg_.firewalls.size(); ++i) {
      const auto path = indexed("firewalls", i);
      check_device(cfg_.firewalls[i], path);
      check_rules(cfg_.firewalls[i], path);
    }
    check_hosts();
    check_gateways();
    std::stable_sort(out_.begin(), out_.end(), [](const Violation& a, const Violation& b) {
      if (a.path != b.path) return path_less(a.path, b.path);
      return a.message < b.message;
    });
    return std::move(out_);
  }

 private:
  void error(std::string path, std::string message) {
    out_.push_back({Severity::Error, std::move(path), std::move(message)});
  }
  void warning(std::string path, std::string message) {
    out_.push_back({Severity::Warning, std::move(path), std::move(message)});
  }

  void check_bridges() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg_.bridges.size(); ++i)
      if (!seen.insert(cfg_.bridges[i]).second) error(indexed("bridges", i), "duplicate bridge '" + cfg_.bridges[i] + "'");
  }

  void check_vlans() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < cfg_.vlans.size(); ++i) {
      const auto& v = cfg_.vlans[i];
      const auto path = indexed("vlans", i);
      if (!names.insert(v.name).second) error(path + ".name", "duplicate vlan name '" + v.name + "'");
      if (!v.cidr.is_canonical()) error(path + ".cidr", "cidr " + v.cidr.to_string() + " has host bits set");
      if (std::find(cfg_.bridges.begin(), cfg_.bridges.end(), v.bridge) == cfg_.bridges.end())
        error(path + ".bridge", "unresolved bridge '" + v.bridge + "'");
    }
    // Overlapping VLAN networks make address ownership ambiguous.
    for (std::size_t i = 0; i < cfg_.vlans.size(); ++i)
      for (std::size_t j = i + 1; j < cfg_.vlans.size(); ++j) {
        const auto& a = cfg_.vlans[i].cidr;
        const auto& b = cfg_.vlans[j].cidr;
        if (a.contains(b.network()) || b.contains(a.network()))
          warning(indexed("vlans", j) + ".cidr", "overlaps vlan '" + cfg_.vlans[i].name + "'");
      }
  }

  void check_templates() {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cfg_.templates.size(); ++i)
      if (!ids.insert(cfg_.templates[i].id).second)
        error(indexed("templates", i) + ".id", "duplicate template id '" + cfg_.templates[i].id + "'");
  }

  // Shared checks for one attachment (router interface or host nic).
  void check_attachment(const Attachment& a, const std::string& path) {
    const auto* vlan = cfg_.find_vlan(a.vlan);
    if (!vlan) {
      error(path + ".vlan", "unresolved vlan '" + a.vlan + "'");
    } else if (!vlan->cidr.contains(a.ip)) {
      error(path + ".ip", "ip outside vlan cidr (" + a.ip.to_string() + " not in " + vlan->cidr.to_string() + ")");
    } else if (vlan->cidr.length() <= 30 && (a.ip == vlan->cidr.network() || a.ip == vlan->cidr.broadcast())) {
      warning(path + ".ip", "ip is the network or broadcast address of " + vlan->cidr.to_string());
    }
    auto [it, inserted] = ip_owner_.try_emplace(a.ip.value(), path);
    if (!inserted) error(path + ".ip", "duplicate ip " + a.ip.to_string() + " (also at " + it->second + ")");
  }

  void check_device(const RouterSpec& r, const std::string& path) {
    if (!device_names_.insert(r.name).second) error(path + ".name", "duplicate device name '" + r.name + "'");
    std::set<std::string> vlans_seen;
    for (std::size_t i = 0; i < r.interfaces.size(); ++i) {
      const auto ipath = indexed(path + ".interfaces", i);
      check_attachment(r.interfaces[i], ipath);
      if (!vlans_seen.insert(r.interfaces[i].vlan).second)
        error(ipath + ".vlan", "second interface on vlan '" + r.interfaces[i].vlan + "'");
    }
    for (std::size_t i = 0; i < r.static_routes.size(); ++i) {
      const auto& route = r.static_routes[i];
      const auto rpath = indexed(path + ".static_routes", i);
      if (!route.prefix.is_canonical())
        error(rpath + ".prefix", "prefix " + route.prefix.to_string() + " has host bits set");
      bool on_link = std::any_of(r.interfaces.begin(), r.interfaces.end(), [&](const Attachment& a) {
        const auto* vlan = cfg_.find_vlan(a.vlan);
        return vlan && vlan->cidr.contains(route.via);
      });
      if (!on_link) warning(rpath + ".via", "next hop " + route.via.to_string() + " is not on a connected vlan");
    }
  }

  void check_rules(const FirewallSpec& fw, const std::string& path) {
    std::map<int, std::size_t> orders;
    for (std::size_t i = 0; i < fw.rules.size(); ++i) {
      const auto& rule = fw.rules[i];
      const auto rpath = indexed(path + ".rules", i);
      if (!orders.try_emplace(rule.order, i).second)
        error(rpath + ".order", "duplicate rule order " + std::to_string(rule.order));
      if (rule.dst_port) {
        if (rule.dst_port->low < 1 || rule.dst_port->low > rule.dst_port->high)
          error(rpath + ".dst_port", "port range low must satisfy 1 <= low <= high");
        if (rule.proto == RuleProto::Any)
          warning(rpath + ".dst_port", "port range on a protocol-agnostic rule");
      }
    }
  }

  void check_hosts() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < cfg_.hosts.size(); ++i) {
      const auto& h = cfg_.hosts[i];
      const auto path = indexed("hosts", i);
      if (!names.insert(h.name).second) error(path + ".name", "duplicate host name '" + h.name + "'");
      if (device_names_.count(h.name)) error(path + ".name", "host name '" + h.name + "' collides with a device");
      if (!cfg_.find_template(h.template_id))
        error(path + ".template", "unresolved template '" + h.template_id + "'");
      if (h.nics.empty()) warning(path + ".nics", "host has no network interface");
      for (std::size_t n = 0; n < h.nics.size(); ++n) check_attachment(h.nics[n], indexed(path + ".nics", n));
      std::set<std::string> pkgs;
      for (std::size_t p = 0; p < h.packages.size(); ++p)
        if (!pkgs.insert(h.packages[p].name).second)
          error(indexed(path + ".packages", p) + ".name", "package '" + h.packages[p].name + "' listed twice");
    }
  }

  // An explicit gateway must be one of the VLAN's router/firewall addresses.
  void check_gateways() {
    for (std::size_t i = 0; i < cfg_.vlans.size(); ++i) {
      const auto& v = cfg_.vlans[i];
      if (!v.gateway) continue;
      bool owned = false;
      auto scan = [&](const RouterSpec& r) {
        for (const auto& a : r.interfaces)
          if (a.vlan == v.name && a.ip == *v.gateway) owned = true;
      };
      for (const auto& r : cfg_.routers) scan(r);
      for (const auto& f : cfg_.firewalls) scan(f);
      if (!owned)
        error(indexed("vlans", i) + ".gateway",
              "gateway " + v.gateway->to_string() + " is not a router or firewall interface on the vlan");
    }
  }

  const TestbedConfig& cfg_;
  std::vector<Violation> out_;
  std::map<std::uint32_t, std::string> ip_owner_;
  std::set<std::string> device_names_;
};

}  // namespace

std::vector<Violation> validate_config(const TestbedConfig& cfg) { return Checker(cfg).run(); }

bool has_errors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::Error; });
}

bool path_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ei = i, ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      auto na = std::stoull(a.substr(i, ei - i));
      auto nb = std::stoull(b.substr(j, ej - j));
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  return (a.size() - i) < (b.size() - j);
}

ValidationFailed::ValidationFailed(std::vector<Violation> violations)
    : Error(ErrorKind::Validation,
            "configuration has " + std::to_string(violations.size()) + " violation(s)" +
                (violations.empty() ? std::string() : ": " + violations.front().path + ": " + violations.front().message)),
      violations_(std::move(violations)) {}

}  // namespace testbed::model
