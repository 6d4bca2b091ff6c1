#pragma once

#include <optional>
#include <span>
#include <vector>

#include "testbed/scanmerge/types.hpp"

namespace testbed::scanmerge {

/// Hybrid Nmap/OpenVAS OS decision for one host.
///
/// Both inputs are optional. OpenVAS is consulted first since it names Linux
/// distributions; Nmap fills in when OpenVAS only has a generic (kernel or
/// versionless) CPE. Windows XP CPEs and XP-only text are ignored. A source
/// holding several distinct non-generic CPEs never yields a generation.
///
/// Decision order, with V and N the non-generic, non-XP OS CPEs of OpenVAS
/// and Nmap:
///   |V| == 1                         -> UseOpenVASWithVersion (from V)
///   |V| == 0, |N| == 1               -> UseNmapWithVersion (from N)
///   |V| >= 2, |N| == 1, same os      -> UseOpenVASAndNmap (os from OpenVAS,
///                                        family/generation from N)
///   |V| >= 2, OpenVAS identity       -> UseOpenVASOnly
///   |V| == 0, |N| >= 2, Nmap identity-> UseNmapOnly
///   OpenVAS identity                 -> UseOpenVASOnly
///   Nmap identity                    -> UseNmapOnly
///   otherwise                        -> Fail
/// "Identity" is the observation's os/vendor/family text, completed by any
/// field on which all of its CPEs agree.
OsVerdict consolidate(const std::optional<OsObservation>& nmap, const std::optional<OsObservation>& openvas);

CoverageReport coverage_stats(std::span<const OsVerdict> verdicts);

/// Joins Nmap and OpenVAS entries by IP, in order of first appearance
/// (Nmap entries first). Services and vulnerabilities are unioned.
std::vector<HostScanEntry> merge_entries(std::span<const HostScanEntry> nmap, std::span<const HostScanEntry> openvas);

struct HostVerdict {
  Ipv4Addr ip;
  OsVerdict verdict;
};

std::vector<HostVerdict> consolidate_all(std::span<const HostScanEntry> merged);

}  // namespace testbed::scanmerge
