#pragma once

// Outcome-level reference for the OS consolidation decision. CPEs come from
// a hand-classified catalog, so nothing here calls the library's CPE logic.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "testbed/scanmerge/types.hpp"

namespace testsupport {

struct CatalogCpe {
  const char* text;
  const char* os;  // hand-assigned OS name
  bool generic;
  bool xp;
};

inline const std::vector<CatalogCpe>& cpe_catalog() {
  static const std::vector<CatalogCpe> catalog{
      {"cpe:/o:canonical:ubuntu_linux:16.04", "Linux", false, false},
      {"cpe:/o:canonical:ubuntu_linux:14.04", "Linux", false, false},
      {"cpe:/o:canonical:ubuntu_linux:12.04", "Linux", false, false},
      {"cpe:/o:debian:debian_linux:7", "Linux", false, false},
      {"cpe:/o:opensuse:opensuse:11.4", "Linux", false, false},
      {"cpe:/o:linux:linux_kernel:2.6", "Linux", true, false},
      {"cpe:/o:linux:linux_kernel:4.15", "Linux", true, false},
      {"cpe:/o:linux:linux_kernel", "Linux", true, false},
      {"cpe:/o:linux:linux_kernel:2.6.32", "Linux", false, false},
      {"cpe:/o:microsoft:windows_7::sp1", "Windows", false, false},
      {"cpe:/o:microsoft:windows_10:1803", "Windows", false, false},
      {"cpe:/o:microsoft:windows_server_2008::sp1", "Windows", false, false},
      {"cpe:/o:microsoft:windows_7", "Windows", true, false},
      {"cpe:/o:microsoft:windows", "Windows", true, false},
      {"cpe:/o:microsoft:windows_xp::sp3", "Windows", false, true},
      {"cpe:/o:microsoft:windows:xp", "Windows", false, true},
      {"cpe:/o:apple:mac_os_x:10.13", "Mac OS X", false, false},
  };
  return catalog;
}

/// An observation as the oracle sees it: catalog indices plus text fields.
struct OracleObs {
  std::vector<std::size_t> cpes;
  std::optional<std::string> os, vendor, family, generation;
};

inline bool ieq(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  return true;
}

struct OracleSide {
  std::set<std::size_t> usable, specific;
  std::optional<std::string> os;  // identity os after completion
  bool text = false;
};

inline OracleSide oracle_side(const std::optional<OracleObs>& obs) {
  OracleSide s;
  if (!obs) return s;
  const auto& cat = cpe_catalog();
  for (auto i : obs->cpes) {
    if (cat[i].xp) continue;
    s.usable.insert(i);
    if (!cat[i].generic) s.specific.insert(i);
  }
  const bool xp_text = (obs->family && ieq(*obs->family, "xp")) || (obs->generation && ieq(*obs->generation, "xp"));
  if (!xp_text) {
    s.os = obs->os;
    s.text = obs->os || obs->vendor || obs->family;
  }
  if (!s.usable.empty()) {
    std::set<std::string> names;
    for (auto i : s.usable) names.insert(cat[i].os);
    if (names.size() == 1) {
      if (!s.os) s.os = *names.begin();
      s.text = true;
    }
  }
  return s;
}

inline testbed::scanmerge::Outcome oracle_outcome(const std::optional<OracleObs>& nmap,
                                                  const std::optional<OracleObs>& openvas) {
  using testbed::scanmerge::Outcome;
  const auto ov = oracle_side(openvas);
  const auto nm = oracle_side(nmap);
  if (ov.specific.size() == 1) return Outcome::UseOpenVASWithVersion;
  if (ov.specific.empty() && nm.specific.size() == 1) return Outcome::UseNmapWithVersion;
  if (ov.specific.size() >= 2) {
    if (nm.specific.size() == 1 && ov.os && ieq(cpe_catalog()[*nm.specific.begin()].os, *ov.os))
      return Outcome::UseOpenVASAndNmap;
    if (ov.text) return Outcome::UseOpenVASOnly;
  } else if (nm.specific.size() >= 2 && nm.text) {
    return Outcome::UseNmapOnly;
  }
  if (ov.text) return Outcome::UseOpenVASOnly;
  if (nm.text) return Outcome::UseNmapOnly;
  return Outcome::Fail;
}

}  // namespace testsupport
