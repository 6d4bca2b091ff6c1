#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "testbed/scanmerge/reports.hpp"

namespace testbed::scanmerge {

namespace pt = boost::property_tree;

namespace {

std::optional<std::string> attribute(const pt::ptree& node, const char* name) {
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    if (auto value = attrs->get_optional<std::string>(name)) return *value;
  }
  return std::nullopt;
}

std::string require_attribute(const pt::ptree& node, const char* name, const std::string& path) {
  auto value = attribute(node, name);
  if (!value) throw ReportParseError(path, std::string("missing attribute '") + name + "'");
  return *value;
}

double parse_accuracy(const std::string& text, const std::string& path) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0 || value > 100)
    throw ReportParseError(path, "accuracy '" + text + "' is not a percentage");
  return value;
}

std::optional<std::string> non_empty(std::optional<std::string> value) {
  if (value && value->empty()) return std::nullopt;
  return value;
}

std::string trimmed(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

struct OsClassText {
  std::optional<std::string> vendor, osfamily, osgen;
};

// Keeps a field only if every top-tier osclass reports the same value.
std::optional<std::string> unanimous(const std::vector<OsClassText>& classes,
                                     std::optional<std::string> OsClassText::*field) {
  if (classes.empty()) return std::nullopt;
  auto first = classes.front().*field;
  for (const auto& c : classes)
    if (c.*field != first) return std::nullopt;
  return first;
}

OsObservation parse_os(const pt::ptree* os_node, const std::string& path) {
  OsObservation obs;
  obs.source = ScanSource::Nmap;
  if (!os_node) return obs;

  struct Match {
    double accuracy;
    std::vector<CpeUri> cpes;
    std::vector<OsClassText> classes;
  };
  std::vector<Match> matches;
  int ordinal = 0;
  for (const auto& [tag, match] : *os_node) {
    if (tag != "osmatch") continue;
    const std::string match_path = path + "/osmatch[" + std::to_string(++ordinal) + "]";
    Match m;
    auto accuracy = attribute(match, "accuracy");
    m.accuracy = accuracy ? parse_accuracy(*accuracy, match_path) : 0.0;
    int class_ordinal = 0;
    for (const auto& [ctag, osclass] : match) {
      if (ctag != "osclass") continue;
      const std::string class_path = match_path + "/osclass[" + std::to_string(++class_ordinal) + "]";
      m.classes.push_back({non_empty(attribute(osclass, "vendor")), non_empty(attribute(osclass, "osfamily")),
                           non_empty(attribute(osclass, "osgen"))});
      for (const auto& [cpetag, cpe_node] : osclass) {
        if (cpetag != "cpe") continue;
        CpeUri cpe;
        try {
          cpe = CpeUri::parse(trimmed(cpe_node.data()));
        } catch (const MalformedCpe& e) {
          throw ReportParseError(class_path + "/cpe", e.what());
        }
        if (cpe.part != CpePart::OS) continue;
        if (std::find(m.cpes.begin(), m.cpes.end(), cpe) == m.cpes.end()) m.cpes.push_back(std::move(cpe));
      }
    }
    matches.push_back(std::move(m));
  }
  if (matches.empty()) return obs;

  double best = 0;
  for (const auto& m : matches) best = std::max(best, m.accuracy);
  obs.accuracy = best;
  std::vector<OsClassText> top_classes;
  for (auto& m : matches) {
    if (m.accuracy != best) continue;
    for (auto& cpe : m.cpes)
      if (std::find(obs.cpes.begin(), obs.cpes.end(), cpe) == obs.cpes.end()) obs.cpes.push_back(cpe);
    top_classes.insert(top_classes.end(), m.classes.begin(), m.classes.end());
  }
  // Nmap's osfamily/vendor/osgen read as os/vendor/family ("Windows",
  // "Microsoft", "7"); Nmap never states a finer generation in text.
  obs.os = unanimous(top_classes, &OsClassText::osfamily);
  obs.vendor = unanimous(top_classes, &OsClassText::vendor);
  obs.family = unanimous(top_classes, &OsClassText::osgen);
  return obs;
}

std::vector<ServiceObservation> parse_ports(const pt::ptree* ports, const std::string& path) {
  std::vector<ServiceObservation> out;
  if (!ports) return out;
  int ordinal = 0;
  for (const auto& [tag, port] : *ports) {
    if (tag != "port") continue;
    const std::string port_path = path + "/port[" + std::to_string(++ordinal) + "]";
    if (auto state = port.get_child_optional("state")) {
      auto s = attribute(*state, "state");
      if (s && *s != "open" && *s != "open|filtered") continue;
    }
    ServiceObservation svc;
    const auto portid = require_attribute(port, "portid", port_path);
    unsigned number = 0;
    auto [ptr, ec] = std::from_chars(portid.data(), portid.data() + portid.size(), number);
    if (ec != std::errc{} || ptr != portid.data() + portid.size() || number < 1 || number > 65535)
      throw ReportParseError(port_path, "portid '" + portid + "' out of range");
    svc.port = static_cast<std::uint16_t>(number);
    const auto protocol = require_attribute(port, "protocol", port_path);
    if (protocol == "tcp") svc.proto = TransportProto::TCP;
    else if (protocol == "udp") svc.proto = TransportProto::UDP;
    else continue;  // sctp, ip: outside the service model

    if (auto service = port.get_child_optional("service")) {
      svc.name = attribute(*service, "name").value_or("");
      auto product = non_empty(attribute(*service, "product"));
      auto version = non_empty(attribute(*service, "version"));
      svc.version = version;
      if (svc.name.empty() && product) svc.name = *product;
      for (const auto& [stag, child] : *service) {
        if (stag != "cpe") continue;
        try {
          auto cpe = CpeUri::parse(trimmed(child.data()));
          if (cpe.part == CpePart::Application && !svc.cpe) svc.cpe = std::move(cpe);
        } catch (const MalformedCpe& e) {
          throw ReportParseError(port_path + "/service/cpe", e.what());
        }
      }
    }
    if (svc.name.empty()) svc.name = "unknown";
    bool duplicate = std::any_of(out.begin(), out.end(), [&](const ServiceObservation& s) {
      return s.port == svc.port && s.proto == svc.proto;
    });
    if (!duplicate) out.push_back(std::move(svc));
  }
  return out;
}

}  // namespace

std::vector<HostScanEntry> parse_nmap_report(std::string_view document) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(document)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ReportParseError("line " + std::to_string(e.line()), "malformed XML: " + e.message());
  }
  auto root = tree.get_child_optional("nmaprun");
  if (!root) throw ReportParseError("/", "missing <nmaprun> root element");

  std::vector<HostScanEntry> hosts;
  int ordinal = 0;
  for (const auto& [tag, host] : *root) {
    if (tag != "host") continue;
    const std::string path = "nmaprun/host[" + std::to_string(++ordinal) + "]";
    std::optional<Ipv4Addr> ip;
    for (const auto& [atag, address] : host) {
      if (atag != "address") continue;
      auto type = attribute(address, "addrtype").value_or("ipv4");
      if (type != "ipv4") continue;
      auto addr = require_attribute(address, "addr", path + "/address");
      ip = Ipv4Addr::try_parse(addr);
      if (!ip) throw ReportParseError(path + "/address", "invalid IPv4 address '" + addr + "'");
      break;
    }
    if (!ip) continue;

    HostScanEntry entry;
    entry.ip = *ip;
    auto os = host.get_child_optional("os");
    entry.nmap = parse_os(os ? &*os : nullptr, path + "/os");
    auto ports = host.get_child_optional("ports");
    entry.services = parse_ports(ports ? &*ports : nullptr, path + "/ports");
    hosts.push_back(std::move(entry));
  }
  return hosts;
}

}  // namespace testbed::scanmerge
