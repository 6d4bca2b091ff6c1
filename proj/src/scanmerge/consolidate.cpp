#include "testbed/scanmerge/consolidate.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "testbed/scanmerge/os_identity.hpp"

namespace testbed::scanmerge {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](unsigned char x, unsigned char y) {
    return std::tolower(x) == std::tolower(y);
  });
}

bool text_names_xp(const OsObservation& obs) {
  return (obs.generation && iequals(*obs.generation, "xp")) || (obs.family && iequals(*obs.family, "xp"));
}

struct Evidence {
  std::vector<CpeUri> usable;       // OS, non-XP, de-duplicated
  std::vector<CpeUri> specific;     // usable and non-generic
  OsIdentity identity;              // text fields completed by CPE agreement
};

// Value shared by every identity in `ids`, if all carry the same one.
std::optional<std::string> agreed(const std::vector<OsIdentity>& ids, std::optional<std::string> OsIdentity::*field) {
  if (ids.empty()) return std::nullopt;
  const auto& first = ids.front().*field;
  if (!first) return std::nullopt;
  for (const auto& id : ids)
    if (!(id.*field) || *(id.*field) != *first) return std::nullopt;
  return first;
}

Evidence gather(const std::optional<OsObservation>& obs) {
  Evidence ev;
  if (!obs) return ev;
  for (const auto& cpe : obs->cpes) {
    if (cpe.part != CpePart::OS || is_windows_xp(cpe)) continue;
    if (std::find(ev.usable.begin(), ev.usable.end(), cpe) != ev.usable.end()) continue;
    ev.usable.push_back(cpe);
    if (!is_generic_cpe(cpe)) ev.specific.push_back(cpe);
  }

  if (!text_names_xp(*obs)) {
    ev.identity.os = obs->os;
    ev.identity.vendor = obs->vendor;
    ev.identity.family = obs->family;
  }
  std::vector<OsIdentity> described;
  for (const auto& cpe : ev.usable) described.push_back(describe_os_cpe(cpe));
  if (!ev.identity.os) ev.identity.os = agreed(described, &OsIdentity::os);
  if (!ev.identity.vendor) ev.identity.vendor = agreed(described, &OsIdentity::vendor);
  if (!ev.identity.family) ev.identity.family = agreed(described, &OsIdentity::family);
  return ev;
}

OsVerdict with_version(Outcome outcome, const CpeUri& cpe) {
  auto id = describe_os_cpe(cpe);
  return {outcome, id.os, id.vendor, id.family, id.generation};
}

OsVerdict text_only(Outcome outcome, const OsIdentity& id) {
  return {outcome, id.os, id.vendor, id.family, std::nullopt};
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::UseOpenVASWithVersion: return "UseOpenVASWithVersion";
    case Outcome::UseNmapWithVersion: return "UseNmapWithVersion";
    case Outcome::UseOpenVASAndNmap: return "UseOpenVASAndNmap";
    case Outcome::UseOpenVASOnly: return "UseOpenVASOnly";
    case Outcome::UseNmapOnly: return "UseNmapOnly";
    case Outcome::Fail: return "Fail";
  }
  return "Fail";
}

std::optional<Outcome> outcome_from_string(std::string_view text) {
  for (auto o : kAllOutcomes)
    if (to_string(o) == text) return o;
  return std::nullopt;
}

OsVerdict consolidate(const std::optional<OsObservation>& nmap, const std::optional<OsObservation>& openvas) {
  const Evidence ov = gather(openvas);
  const Evidence nm = gather(nmap);

  if (ov.specific.size() == 1) return with_version(Outcome::UseOpenVASWithVersion, ov.specific.front());
  if (ov.specific.empty() && nm.specific.size() == 1)
    return with_version(Outcome::UseNmapWithVersion, nm.specific.front());

  if (ov.specific.size() >= 2) {
    if (nm.specific.size() == 1 && ov.identity.os) {
      auto nm_id = describe_os_cpe(nm.specific.front());
      if (nm_id.os && iequals(*nm_id.os, *ov.identity.os) && nm_id.generation) {
        return {Outcome::UseOpenVASAndNmap, ov.identity.os, ov.identity.vendor ? ov.identity.vendor : nm_id.vendor,
                nm_id.family, nm_id.generation};
      }
    }
    if (ov.identity.any_text()) return text_only(Outcome::UseOpenVASOnly, ov.identity);
  } else if (nm.specific.size() >= 2 && nm.identity.any_text()) {
    return text_only(Outcome::UseNmapOnly, nm.identity);
  }

  if (ov.identity.any_text()) return text_only(Outcome::UseOpenVASOnly, ov.identity);
  if (nm.identity.any_text()) return text_only(Outcome::UseNmapOnly, nm.identity);
  return {};
}

CoverageReport coverage_stats(std::span<const OsVerdict> verdicts) {
  CoverageReport report;
  for (const auto& v : verdicts) {
    if (v.outcome == Outcome::Fail) continue;
    ++report.total;
    if (v.generation) ++report.with_generation;
  }
  if (report.total > 0)
    report.fraction = static_cast<double>(report.with_generation) / static_cast<double>(report.total);
  return report;
}

std::vector<HostScanEntry> merge_entries(std::span<const HostScanEntry> nmap, std::span<const HostScanEntry> openvas) {
  std::vector<HostScanEntry> merged;
  std::map<std::uint32_t, std::size_t> index;

  auto absorb = [&](const HostScanEntry& entry) {
    auto [it, inserted] = index.try_emplace(entry.ip.value(), merged.size());
    if (inserted) {
      merged.push_back(HostScanEntry{entry.ip, {}, {}, {}, {}});
    }
    auto& dst = merged[it->second];
    if (entry.nmap && !dst.nmap) dst.nmap = entry.nmap;
    if (entry.openvas && !dst.openvas) dst.openvas = entry.openvas;
    for (const auto& svc : entry.services) {
      bool seen = std::any_of(dst.services.begin(), dst.services.end(), [&](const ServiceObservation& s) {
        return s.port == svc.port && s.proto == svc.proto;
      });
      if (!seen) dst.services.push_back(svc);
    }
    for (const auto& v : entry.vulns)
      if (std::find(dst.vulns.begin(), dst.vulns.end(), v) == dst.vulns.end()) dst.vulns.push_back(v);
  };

  for (const auto& e : nmap) absorb(e);
  for (const auto& e : openvas) absorb(e);
  return merged;
}

std::vector<HostVerdict> consolidate_all(std::span<const HostScanEntry> merged) {
  std::vector<HostVerdict> out;
  out.reserve(merged.size());
  for (const auto& entry : merged) out.push_back({entry.ip, consolidate(entry.nmap, entry.openvas)});
  return out;
}

}  // namespace testbed::scanmerge
