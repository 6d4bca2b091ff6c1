#include "testbed/scanmerge/serialize.hpp"

namespace testbed::scanmerge {

using nlohmann::ordered_json;

namespace {

ordered_json nullable(const std::optional<std::string>& s) { return s ? ordered_json(*s) : ordered_json(nullptr); }

}  // namespace

ordered_json to_json(std::span<const HostVerdict> verdicts) {
  auto out = ordered_json::array();
  for (const auto& [ip, v] : verdicts)
    out.push_back({{"ip", ip.to_string()},
                   {"outcome", to_string(v.outcome)},
                   {"os", nullable(v.os)},
                   {"vendor", nullable(v.vendor)},
                   {"family", nullable(v.family)},
                   {"generation", nullable(v.generation)}});
  return out;
}

ordered_json to_json(const CoverageReport& report) {
  return {{"total", report.total},
          {"with_generation", report.with_generation},
          {"fraction", report.fraction ? ordered_json(*report.fraction) : ordered_json(nullptr)}};
}

}  // namespace testbed::scanmerge
