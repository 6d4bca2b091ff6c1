#pragma once

#include <span>

#include "json.hpp"
#include "testbed/scanmerge/consolidate.hpp"

namespace testbed::scanmerge {

/// Array of {ip, outcome, os, vendor, family, generation}; absent fields are null.
nlohmann::ordered_json to_json(std::span<const HostVerdict> verdicts);

nlohmann::ordered_json to_json(const CoverageReport& report);

}  // namespace testbed::scanmerge
