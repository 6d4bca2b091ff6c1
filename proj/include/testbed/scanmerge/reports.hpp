#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/error.hpp"
#include "testbed/scanmerge/types.hpp"

namespace testbed::scanmerge {

/// Raised for malformed scanner reports. `where` is an element path for
/// Nmap XML (e.g. `nmaprun/host[2]/os/osmatch[1]`) or `row N, column C`
/// for the OpenVAS CSV.
class ReportParseError : public SyntaxError {
 public:
  ReportParseError(std::string where, const std::string& what)
      : SyntaxError(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Nmap `-O -oX` output. One entry per <host> carrying an IPv4 address. The
/// OS observation keeps the CPEs of every osmatch tied at the top accuracy;
/// a missing accuracy attribute counts as 0.
std::vector<HostScanEntry> parse_nmap_report(std::string_view document);

inline const std::vector<std::string> kOpenVasColumns = {
    "ip",       "os_cpe",   "os",   "family",  "generation",      "vendor",     "cve_id",
    "severity", "port",     "proto", "service", "service_version", "service_cpe"};

/// Normalized OpenVAS CSV (see kOpenVasColumns). Rows are grouped by IP in
/// order of first appearance; empty fields mean "absent".
std::vector<HostScanEntry> parse_openvas_report(std::string_view document);

}  // namespace testbed::scanmerge
