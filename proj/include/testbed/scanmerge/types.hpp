#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/ipv4.hpp"
#include "testbed/scanmerge/cpe.hpp"

namespace testbed::scanmerge {

enum class ScanSource { Nmap, OpenVAS };

/// What one scanner believes about a host's operating system.
struct OsObservation {
  ScanSource source = ScanSource::Nmap;
  std::vector<CpeUri> cpes;         // OS CPEs only
  std::optional<double> accuracy;   // percent, [0, 100]
  std::optional<std::string> os;
  std::optional<std::string> vendor;
  std::optional<std::string> family;
  std::optional<std::string> generation;

  friend bool operator==(const OsObservation&, const OsObservation&) = default;
};

enum class Outcome {
  UseOpenVASWithVersion,
  UseNmapWithVersion,
  UseOpenVASAndNmap,
  UseOpenVASOnly,
  UseNmapOnly,
  Fail,
};

inline constexpr Outcome kAllOutcomes[] = {Outcome::UseOpenVASWithVersion, Outcome::UseNmapWithVersion,
                                           Outcome::UseOpenVASAndNmap,     Outcome::UseOpenVASOnly,
                                           Outcome::UseNmapOnly,           Outcome::Fail};

std::string_view to_string(Outcome outcome);
std::optional<Outcome> outcome_from_string(std::string_view text);

/// Outcomes that promise an OS generation.
constexpr bool carries_generation(Outcome outcome) {
  return outcome == Outcome::UseOpenVASWithVersion || outcome == Outcome::UseNmapWithVersion ||
         outcome == Outcome::UseOpenVASAndNmap;
}

struct OsVerdict {
  Outcome outcome = Outcome::Fail;
  std::optional<std::string> os;
  std::optional<std::string> vendor;
  std::optional<std::string> family;
  std::optional<std::string> generation;

  friend bool operator==(const OsVerdict&, const OsVerdict&) = default;
};

enum class TransportProto { TCP, UDP };

struct ServiceObservation {
  std::uint16_t port = 0;
  TransportProto proto = TransportProto::TCP;
  std::string name;
  std::optional<std::string> version;
  std::optional<CpeUri> cpe;

  friend bool operator==(const ServiceObservation&, const ServiceObservation&) = default;
};

struct Vulnerability {
  std::string cve_id;
  double severity = 0.0;  // CVSS, [0, 10]

  friend bool operator==(const Vulnerability&, const Vulnerability&) = default;
};

struct HostScanEntry {
  Ipv4Addr ip;
  std::optional<OsObservation> nmap;
  std::optional<OsObservation> openvas;
  std::vector<ServiceObservation> services;  // (port, proto) unique
  std::vector<Vulnerability> vulns;
};

struct CoverageReport {
  std::size_t total = 0;            // non-Fail verdicts
  std::size_t with_generation = 0;
  std::optional<double> fraction;   // absent when total == 0
};

}  // namespace testbed::scanmerge
