#include <algorithm>
#include <set>

#include "json.hpp"

#include "testbed/model/config.hpp"

namespace testbed::model {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Cursor into the document that knows its own field path for diagnostics.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigSyntaxError(path_, what); }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, _] : value_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) child_path_fail(key, "unknown field");
    }
  }

  bool has(std::string_view key) const { return value_.contains(key) && !value_.at(std::string(key)).is_null(); }

  Node at(std::string_view key) const {
    if (!has(key)) child_path_fail(std::string(key), "missing required field");
    return Node(value_.at(std::string(key)), join(key));
  }

  std::vector<Node> array_at(std::string_view key) const {
    std::vector<Node> out;
    if (!has(key)) return out;
    const auto& arr = value_.at(std::string(key));
    const auto path = join(key);
    if (!arr.is_array()) Node(arr, path).fail("expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) out.emplace_back(arr[i], path + "[" + std::to_string(i) + "]");
    return out;
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    auto s = value_.get<std::string>();
    if (s.empty()) fail("must not be empty");
    return s;
  }

  std::int64_t integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<std::int64_t>();
  }

  Ipv4Addr ip() const {
    auto s = string();
    auto addr = Ipv4Addr::try_parse(s);
    if (!addr) fail("invalid IPv4 address '" + s + "'");
    return *addr;
  }

  Ipv4Prefix prefix() const {
    auto s = string();
    auto p = Ipv4Prefix::try_parse(s);
    if (!p) fail("invalid IPv4 prefix '" + s + "' (expected a.b.c.d/len)");
    return *p;
  }

  const json& raw() const { return value_; }

 private:
  std::string join(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  [[noreturn]] void child_path_fail(const std::string& key, const std::string& what) const {
    throw ConfigSyntaxError(join(key), what);
  }

  const json& value_;
  std::string path_;
};

Attachment read_attachment(const Node& n) {
  n.expect_object({"vlan", "ip"});
  return {n.at("vlan").string(), n.at("ip").ip()};
}

StaticRoute read_route(const Node& n) {
  n.expect_object({"prefix", "via"});
  return {n.at("prefix").prefix(), n.at("via").ip()};
}

void read_router_body(const Node& n, RouterSpec& r) {
  r.name = n.at("name").string();
  for (const auto& i : n.array_at("interfaces")) r.interfaces.push_back(read_attachment(i));
  for (const auto& s : n.array_at("static_routes")) r.static_routes.push_back(read_route(s));
}

std::uint16_t read_port(const Node& n) {
  auto v = n.integer();
  if (v < 1 || v > 65535) n.fail("port must be in 1..65535");
  return static_cast<std::uint16_t>(v);
}

PortRange read_port_range(const Node& n) {
  if (n.raw().is_number_integer()) {
    auto p = read_port(n);
    return {p, p};
  }
  n.expect_object({"low", "high"});
  // Ordering of low/high is a semantic rule left to validation.
  return {read_port(n.at("low")), read_port(n.at("high"))};
}

FirewallRule read_rule(const Node& n) {
  n.expect_object({"order", "action", "src", "dst", "proto", "dst_port"});
  FirewallRule rule;
  rule.order = static_cast<int>(n.at("order").integer());
  auto action = n.at("action").string();
  if (action == "Allow") rule.action = RuleAction::Allow;
  else if (action == "Deny") rule.action = RuleAction::Deny;
  else n.at("action").fail("expected Allow or Deny");
  rule.src = n.at("src").prefix();
  rule.dst = n.at("dst").prefix();
  auto proto = n.has("proto") ? n.at("proto").string() : std::string("Any");
  if (proto == "TCP") rule.proto = RuleProto::TCP;
  else if (proto == "UDP") rule.proto = RuleProto::UDP;
  else if (proto == "Any") rule.proto = RuleProto::Any;
  else n.at("proto").fail("expected TCP, UDP or Any");
  if (n.has("dst_port")) rule.dst_port = read_port_range(n.at("dst_port"));
  return rule;
}

PackageSpec read_package(const Node& n) {
  n.expect_object({"name", "version", "origin_cpe"});
  PackageSpec p{n.at("name").string(), n.at("version").string(), std::nullopt};
  if (n.has("origin_cpe")) {
    auto text = n.at("origin_cpe").string();
    try {
      p.origin_cpe = scanmerge::CpeUri::parse(text);
    } catch (const scanmerge::MalformedCpe& e) {
      n.at("origin_cpe").fail(e.what());
    }
  }
  return p;
}

HostSpec read_host(const Node& n) {
  n.expect_object({"name", "template", "nics", "packages", "agent_profile", "node"});
  HostSpec h;
  h.name = n.at("name").string();
  h.template_id = n.at("template").string();
  for (const auto& nic : n.array_at("nics")) h.nics.push_back(read_attachment(nic));
  for (const auto& pkg : n.array_at("packages")) h.packages.push_back(read_package(pkg));
  if (n.has("agent_profile")) h.agent_profile = n.at("agent_profile").string();
  if (n.has("node")) h.node = n.at("node").string();
  return h;
}

ordered_json attachments_json(const std::vector<Attachment>& items) {
  auto out = ordered_json::array();
  for (const auto& a : items) out.push_back({{"vlan", a.vlan}, {"ip", a.ip.to_string()}});
  return out;
}

ordered_json router_json(const RouterSpec& r) {
  ordered_json out;
  out["name"] = r.name;
  out["interfaces"] = attachments_json(r.interfaces);
  out["static_routes"] = ordered_json::array();
  for (const auto& s : r.static_routes)
    out["static_routes"].push_back({{"prefix", s.prefix.to_string()}, {"via", s.via.to_string()}});
  return out;
}

}  // namespace

std::string_view to_string(RuleAction action) { return action == RuleAction::Allow ? "Allow" : "Deny"; }

std::string_view to_string(RuleProto proto) {
  switch (proto) {
    case RuleProto::TCP: return "TCP";
    case RuleProto::UDP: return "UDP";
    case RuleProto::Any: return "Any";
  }
  return "Any";
}

const VlanSpec* TestbedConfig::find_vlan(std::string_view name) const {
  auto it = std::find_if(vlans.begin(), vlans.end(), [&](const VlanSpec& v) { return v.name == name; });
  return it == vlans.end() ? nullptr : &*it;
}

const HostSpec* TestbedConfig::find_host(std::string_view name) const {
  auto it = std::find_if(hosts.begin(), hosts.end(), [&](const HostSpec& h) { return h.name == name; });
  return it == hosts.end() ? nullptr : &*it;
}

const TemplateSpec* TestbedConfig::find_template(std::string_view id) const {
  auto it = std::find_if(templates.begin(), templates.end(), [&](const TemplateSpec& t) { return t.id == id; });
  return it == templates.end() ? nullptr : &*it;
}

TestbedConfig load_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, document.size());
    auto line = 1 + std::count(document.begin(), document.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigSyntaxError("line " + std::to_string(line), "malformed JSON");
  }

  Node root(doc, "");
  root.expect_object({"bridges", "vlans", "routers", "firewalls", "hosts", "templates"});

  TestbedConfig cfg;
  for (const auto& b : root.array_at("bridges")) cfg.bridges.push_back(b.string());

  std::set<std::string> vlan_names;
  for (const auto& v : root.array_at("vlans")) {
    v.expect_object({"name", "cidr", "bridge", "gateway"});
    VlanSpec vlan{v.at("name").string(), v.at("cidr").prefix(), v.at("bridge").string(), std::nullopt};
    if (v.has("gateway")) vlan.gateway = v.at("gateway").ip();
    if (!vlan_names.insert(vlan.name).second) v.at("name").fail("duplicate vlan name '" + vlan.name + "'");
    cfg.vlans.push_back(std::move(vlan));
  }

  for (const auto& r : root.array_at("routers")) {
    r.expect_object({"name", "interfaces", "static_routes"});
    RouterSpec router;
    read_router_body(r, router);
    cfg.routers.push_back(std::move(router));
  }

  for (const auto& f : root.array_at("firewalls")) {
    f.expect_object({"name", "interfaces", "static_routes", "rules"});
    FirewallSpec fw;
    read_router_body(f, fw);
    for (const auto& rule : f.array_at("rules")) fw.rules.push_back(read_rule(rule));
    cfg.firewalls.push_back(std::move(fw));
  }

  for (const auto& h : root.array_at("hosts")) cfg.hosts.push_back(read_host(h));

  for (const auto& t : root.array_at("templates")) {
    t.expect_object({"id", "os", "family", "generation"});
    TemplateSpec tmpl{t.at("id").string(), t.at("os").string(), t.at("family").string(), std::nullopt};
    if (t.has("generation")) tmpl.generation = t.at("generation").string();
    cfg.templates.push_back(std::move(tmpl));
  }
  return cfg;
}

std::string save_config(const TestbedConfig& cfg) {
  ordered_json out;
  out["bridges"] = cfg.bridges;

  out["vlans"] = ordered_json::array();
  for (const auto& v : cfg.vlans) {
    ordered_json j{{"name", v.name}, {"cidr", v.cidr.to_string()}, {"bridge", v.bridge}};
    if (v.gateway) j["gateway"] = v.gateway->to_string();
    out["vlans"].push_back(std::move(j));
  }

  out["routers"] = ordered_json::array();
  for (const auto& r : cfg.routers) out["routers"].push_back(router_json(r));

  out["firewalls"] = ordered_json::array();
  for (const auto& f : cfg.firewalls) {
    auto j = router_json(f);
    j["rules"] = ordered_json::array();
    for (const auto& rule : f.rules) {
      ordered_json r{{"order", rule.order},
                     {"action", to_string(rule.action)},
                     {"src", rule.src.to_string()},
                     {"dst", rule.dst.to_string()},
                     {"proto", to_string(rule.proto)}};
      if (rule.dst_port) r["dst_port"] = {{"low", rule.dst_port->low}, {"high", rule.dst_port->high}};
      j["rules"].push_back(std::move(r));
    }
    out["firewalls"].push_back(std::move(j));
  }

  out["hosts"] = ordered_json::array();
  for (const auto& h : cfg.hosts) {
    ordered_json j{{"name", h.name}, {"template", h.template_id}, {"nics", attachments_json(h.nics)}};
    j["packages"] = ordered_json::array();
    for (const auto& p : h.packages) {
      ordered_json pj{{"name", p.name}, {"version", p.version}};
      if (p.origin_cpe) pj["origin_cpe"] = p.origin_cpe->to_string();
      j["packages"].push_back(std::move(pj));
    }
    if (h.agent_profile) j["agent_profile"] = *h.agent_profile;
    if (h.node) j["node"] = *h.node;
    out["hosts"].push_back(std::move(j));
  }

  out["templates"] = ordered_json::array();
  for (const auto& t : cfg.templates) {
    ordered_json j{{"id", t.id}, {"os", t.os}, {"family", t.family}};
    if (t.generation) j["generation"] = *t.generation;
    out["templates"].push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace testbed::model
