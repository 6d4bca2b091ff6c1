#include "testbed/model/mapping.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "testbed/common/csv.hpp"

namespace testbed::model {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](unsigned char x, unsigned char y) {
    return std::tolower(x) == std::tolower(y);
  });
}

bool opt_iequals(const std::optional<std::string>& a, const std::optional<std::string>& b) {
  if (!a || !b) return !a && !b;
  return iequals(*a, *b);
}

std::string describe(const scanmerge::OsVerdict& v) {
  std::string out;
  for (const auto* f : {&v.os, &v.family, &v.generation}) {
    if (!*f) continue;
    if (!out.empty()) out += ' ';
    out += **f;
  }
  return out.empty() ? "<unnamed>" : out;
}

}  // namespace

TemplateId map_host_to_template(const scanmerge::OsVerdict& verdict, std::span<const TemplateSpec> catalog) {
  if (verdict.outcome == scanmerge::Outcome::Fail) throw std::invalid_argument("cannot map a Fail verdict");

  std::vector<const TemplateSpec*> same_family;
  for (const auto& t : catalog) {
    if (verdict.os && !iequals(t.os, *verdict.os)) continue;
    if (!verdict.family || !iequals(t.family, *verdict.family)) continue;
    same_family.push_back(&t);
  }
  if (same_family.empty()) throw NoTemplate("no template for " + describe(verdict));

  if (verdict.generation) {
    for (const auto* t : same_family)
      if (opt_iequals(t->generation, verdict.generation)) return t->id;
    throw NoTemplate("no template for " + describe(verdict));
  }

  if (same_family.size() > 1)
    throw AmbiguousVerdict(describe(verdict) + " matches " + std::to_string(same_family.size()) +
                           " templates and carries no generation");
  if (same_family.front()->generation)
    throw NoTemplate("template '" + same_family.front()->id + "' requires a generation, verdict " +
                     describe(verdict) + " has none");
  return same_family.front()->id;
}

PackageMap PackageMap::parse(std::string_view document) {
  csv::Table table(document, {"vendor", "product", "package"});
  std::vector<PackageMapEntry> entries;
  for (const auto& row : table.rows()) {
    PackageMapEntry e{table.field(row, "vendor"), table.field(row, "product"), table.field(row, "package")};
    if (e.vendor.empty() || e.product.empty() || e.package.empty())
      throw csv::CsvError(row.line, "vendor, product and package are required");
    entries.push_back(std::move(e));
  }
  return PackageMap(std::move(entries));
}

const PackageMapEntry* PackageMap::find(std::string_view vendor, std::string_view product) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const PackageMapEntry& e) { return e.vendor == vendor && e.product == product; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<long long> version_components(std::string_view version) {
  std::vector<long long> out;
  for (;;) {
    auto dot = version.find('.');
    auto part = version.substr(0, dot);
    long long value = 0;
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) break;
      value = value * 10 + (c - '0');
    }
    out.push_back(value);
    if (dot == std::string_view::npos) break;
    version.remove_prefix(dot + 1);
  }
  return out;
}

bool version_less(std::string_view a, std::string_view b) {
  auto ca = version_components(a);
  auto cb = version_components(b);
  const auto n = std::max(ca.size(), cb.size());
  ca.resize(n, 0);
  cb.resize(n, 0);
  if (ca != cb) return ca < cb;
  return a < b;
}

PackageSpec cpe_to_package(const scanmerge::CpeUri& cpe, const PackageMap& mapping,
                           std::span<const std::string> available_versions) {
  const auto* entry = mapping.find(cpe.vendor, cpe.product);
  if (!entry) throw UnmappedCpe("no package mapping for " + cpe.vendor + ":" + cpe.product);
  if (available_versions.empty()) throw std::invalid_argument("available_versions must not be empty");

  PackageSpec pkg{entry->package, "", cpe};
  const auto wanted = cpe.version_token();
  if (wanted && std::find(available_versions.begin(), available_versions.end(), *wanted) != available_versions.end()) {
    pkg.version = *wanted;
    return pkg;
  }

  // Without a version on the CPE every candidate is equally far: take the lowest.
  const auto target = version_components(wanted.value_or("0"));
  auto distance = [&](const std::string& candidate) {
    auto c = version_components(candidate);
    const auto n = std::max(c.size(), target.size());
    std::vector<long long> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      long long x = i < c.size() ? c[i] : 0;
      long long y = i < target.size() ? target[i] : 0;
      d[i] = x > y ? x - y : y - x;
    }
    // Trailing zeros trimmed so vectors of different lengths compare as if padded.
    while (!d.empty() && d.back() == 0) d.pop_back();
    return d;
  };

  const std::string* best = nullptr;
  std::vector<long long> best_distance;
  for (const auto& candidate : available_versions) {
    auto d = wanted ? distance(candidate) : std::vector<long long>{};
    if (!best || d < best_distance || (d == best_distance && version_less(candidate, *best))) {
      best = &candidate;
      best_distance = std::move(d);
    }
  }
  pkg.version = *best;
  return pkg;
}

}  // namespace testbed::model
