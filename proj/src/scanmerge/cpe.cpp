#include "testbed/scanmerge/cpe.hpp"

namespace testbed::scanmerge {

namespace {

constexpr std::string_view kPrefix = "cpe:/";

std::vector<std::string> split_colon(std::string_view text) {
  std::vector<std::string> out;
  for (;;) {
    auto colon = text.find(':');
    out.emplace_back(text.substr(0, colon));
    if (colon == std::string_view::npos) break;
    text.remove_prefix(colon + 1);
  }
  return out;
}

bool is_token_char(char c) {
  // Printable ASCII minus the separator and whitespace.
  return c > ' ' && c <= '~' && c != ':';
}

}  // namespace

char part_letter(CpePart part) {
  switch (part) {
    case CpePart::OS: return 'o';
    case CpePart::Application: return 'a';
    case CpePart::Hardware: return 'h';
  }
  return '?';
}

CpeUri CpeUri::parse(std::string_view text) {
  auto fail = [&](const std::string& why) {
    return MalformedCpe("malformed CPE '" + std::string(text) + "': " + why);
  };
  if (!text.starts_with(kPrefix)) throw fail("missing 'cpe:/' prefix");
  for (char c : text.substr(kPrefix.size()))
    if (c != ':' && !is_token_char(c)) throw fail("illegal character");

  auto segments = split_colon(text.substr(kPrefix.size()));
  if (segments.size() < 3) throw fail("expected at least part:vendor:product");

  CpeUri cpe;
  const auto& part = segments[0];
  if (part == "o") cpe.part = CpePart::OS;
  else if (part == "a") cpe.part = CpePart::Application;
  else if (part == "h") cpe.part = CpePart::Hardware;
  else throw fail("unknown part '" + part + "'");

  cpe.vendor = std::move(segments[1]);
  cpe.product = std::move(segments[2]);
  if (cpe.vendor.empty() || cpe.product.empty()) throw fail("empty vendor or product");
  if (segments.size() > 3) cpe.version = std::move(segments[3]);
  for (std::size_t i = 4; i < segments.size(); ++i) cpe.tail.push_back(std::move(segments[i]));
  return cpe;
}

std::string CpeUri::to_string() const {
  std::string out(kPrefix);
  out += part_letter(part);
  out += ':' + vendor + ':' + product;
  if (version || !tail.empty()) out += ':' + version.value_or("");
  for (const auto& t : tail) out += ':' + t;
  return out;
}

std::optional<std::string> CpeUri::version_token() const {
  if (version && !version->empty() && *version != "-") return version;
  for (const auto& t : tail)
    if (!t.empty() && t != "-") return t;
  return std::nullopt;
}

}  // namespace testbed::scanmerge
