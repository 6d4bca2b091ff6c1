#pragma once

#include <optional>
#include <string>

#include "testbed/scanmerge/cpe.hpp"

namespace testbed::scanmerge {

/// The (os, vendor, family, generation) reading of an OS CPE, e.g.
/// cpe:/o:canonical:ubuntu_linux:16.04 -> Linux, Linux, Ubuntu, 16.04 and
/// cpe:/o:microsoft:windows_7::sp1 -> Windows, Microsoft, 7, SP1.
struct OsIdentity {
  std::optional<std::string> os;
  std::optional<std::string> vendor;
  std::optional<std::string> family;
  std::optional<std::string> generation;

  bool any_text() const { return os || vendor || family; }
  friend bool operator==(const OsIdentity&, const OsIdentity&) = default;
};

OsIdentity describe_os_cpe(const CpeUri& cpe);

/// True when the CPE cannot pin an OS generation: no version-bearing segment,
/// or a bare `linux_kernel` major.minor line.
bool is_generic_cpe(const CpeUri& cpe);

/// product `windows_xp`, or a version token equal to "xp" (any case).
bool is_windows_xp(const CpeUri& cpe);

}  // namespace testbed::scanmerge
