#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/model/config.hpp"
#include "testbed/scanmerge/types.hpp"

namespace testbed::model {

class NoTemplate : public Error {
 public:
  explicit NoTemplate(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class AmbiguousVerdict : public Error {
 public:
  explicit AmbiguousVerdict(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// Picks the template whose (os, family, generation) matches the verdict,
/// comparing case-insensitively. A verdict without a generation only matches
/// a generation-less template, or is ambiguous when the family has several.
/// Throws std::invalid_argument for Fail verdicts.
TemplateId map_host_to_template(const scanmerge::OsVerdict& verdict, std::span<const TemplateSpec> catalog);

// --- application CPE -> package --------------------------------------------

struct PackageMapEntry {
  std::string vendor;
  std::string product;
  std::string package;
};

class PackageMap {
 public:
  PackageMap() = default;
  explicit PackageMap(std::vector<PackageMapEntry> entries) : entries_(std::move(entries)) {}

  /// CSV with header `vendor,product,package`.
  static PackageMap parse(std::string_view document);

  const PackageMapEntry* find(std::string_view vendor, std::string_view product) const;
  const std::vector<PackageMapEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<PackageMapEntry> entries_;
};

class UnmappedCpe : public Error {
 public:
  explicit UnmappedCpe(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// Leading decimal number of each dot-separated component: "7.2p2" -> {7, 2}.
/// Components without leading digits read as 0.
std::vector<long long> version_components(std::string_view version);

/// Orders versions numerically by component, then by raw text.
bool version_less(std::string_view a, std::string_view b);

/// Package for an application CPE. The version is the exact CPE version when
/// available, otherwise the closest candidate: per-component absolute
/// differences compared left to right, ties going to the lower version.
PackageSpec cpe_to_package(const scanmerge::CpeUri& cpe, const PackageMap& mapping,
                           std::span<const std::string> available_versions);

}  // namespace testbed::model
