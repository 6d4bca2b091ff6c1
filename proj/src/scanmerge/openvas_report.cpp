#include <algorithm>
#include <charconv>
#include <map>

#include "testbed/common/csv.hpp"
#include "testbed/scanmerge/reports.hpp"

namespace testbed::scanmerge {

namespace {

std::string where(const csv::Row& row, std::string_view column) {
  return "row " + std::to_string(row.line) + ", column " + std::string(column);
}

std::optional<std::string> optional_field(const std::string& value) {
  if (value.empty()) return std::nullopt;
  return value;
}

void fill(std::optional<std::string>& slot, const std::string& value) {
  if (!slot && !value.empty()) slot = value;
}

}  // namespace

std::vector<HostScanEntry> parse_openvas_report(std::string_view document) {
  std::optional<csv::Table> table;
  try {
    table.emplace(document, kOpenVasColumns);
  } catch (const csv::CsvError& e) {
    throw ReportParseError("row " + std::to_string(e.line()), e.what());
  }

  std::vector<HostScanEntry> hosts;
  std::map<std::uint32_t, std::size_t> index;

  for (const auto& row : table->rows()) {
    auto get = [&](std::string_view column) -> const std::string& { return table->field(row, column); };

    const auto& ip_text = get("ip");
    auto ip = Ipv4Addr::try_parse(ip_text);
    if (!ip) throw ReportParseError(where(row, "ip"), "invalid IPv4 address '" + ip_text + "'");

    auto [it, inserted] = index.try_emplace(ip->value(), hosts.size());
    if (inserted) {
      auto& entry = hosts.emplace_back();
      entry.ip = *ip;
      entry.openvas.emplace().source = ScanSource::OpenVAS;
    }
    auto& host = hosts[it->second];
    auto& obs = *host.openvas;

    if (const auto& text = get("os_cpe"); !text.empty()) {
      CpeUri cpe;
      try {
        cpe = CpeUri::parse(text);
      } catch (const MalformedCpe& e) {
        throw ReportParseError(where(row, "os_cpe"), e.what());
      }
      if (cpe.part != CpePart::OS) throw ReportParseError(where(row, "os_cpe"), "not an OS CPE: " + text);
      if (std::find(obs.cpes.begin(), obs.cpes.end(), cpe) == obs.cpes.end()) obs.cpes.push_back(std::move(cpe));
    }
    fill(obs.os, get("os"));
    fill(obs.family, get("family"));
    fill(obs.generation, get("generation"));
    fill(obs.vendor, get("vendor"));

    if (const auto& cve = get("cve_id"); !cve.empty()) {
      const auto& sev_text = get("severity");
      double severity = 0;
      auto [ptr, ec] = std::from_chars(sev_text.data(), sev_text.data() + sev_text.size(), severity);
      if (sev_text.empty() || ec != std::errc{} || ptr != sev_text.data() + sev_text.size() || severity < 0.0 ||
          severity > 10.0)
        throw ReportParseError(where(row, "severity"), "severity '" + sev_text + "' not in [0, 10]");
      Vulnerability v{cve, severity};
      if (std::find(host.vulns.begin(), host.vulns.end(), v) == host.vulns.end()) host.vulns.push_back(v);
    }

    if (const auto& port_text = get("port"); !port_text.empty()) {
      unsigned port = 0;
      auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
      if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 1 || port > 65535)
        throw ReportParseError(where(row, "port"), "port '" + port_text + "' out of range");
      ServiceObservation svc;
      svc.port = static_cast<std::uint16_t>(port);
      const auto& proto = get("proto");
      if (proto == "tcp" || proto == "TCP") svc.proto = TransportProto::TCP;
      else if (proto == "udp" || proto == "UDP") svc.proto = TransportProto::UDP;
      else throw ReportParseError(where(row, "proto"), "expected tcp or udp, got '" + proto + "'");
      svc.name = get("service").empty() ? "unknown" : get("service");
      svc.version = optional_field(get("service_version"));
      if (const auto& scpe = get("service_cpe"); !scpe.empty()) {
        try {
          svc.cpe = CpeUri::parse(scpe);
        } catch (const MalformedCpe& e) {
          throw ReportParseError(where(row, "service_cpe"), e.what());
        }
      }
      bool duplicate = std::any_of(host.services.begin(), host.services.end(), [&](const ServiceObservation& s) {
        return s.port == svc.port && s.proto == svc.proto;
      });
      if (!duplicate) host.services.push_back(std::move(svc));
    }
  }
  return hosts;
}

}  // namespace testbed::scanmerge
