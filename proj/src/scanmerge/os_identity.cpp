#include "testbed/scanmerge/os_identity.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <string_view>

namespace testbed::scanmerge {

namespace {

struct KnownDistro {
  std::string_view vendor;
  std::string_view product;
  std::string_view family;
};

// Linux distributions the case-study networks actually contain, plus the
// usual neighbours. Vendor "*" matches any vendor.
constexpr std::array<KnownDistro, 12> kLinuxDistros{{
    {"canonical", "ubuntu_linux", "Ubuntu"},
    {"canonical", "ubuntu", "Ubuntu"},
    {"debian", "debian_linux", "Debian"},
    {"opensuse", "opensuse", "openSUSE"},
    {"novell", "opensuse", "openSUSE"},
    {"suse", "opensuse", "openSUSE"},
    {"kali", "kali_linux", "Kali"},
    {"offensive_security", "kali_linux", "Kali"},
    {"redhat", "enterprise_linux", "RHEL"},
    {"centos", "centos", "CentOS"},
    {"fedoraproject", "fedora", "Fedora"},
    {"*", "zeroshell", "ZeroShell"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

// "server_2008" -> "Server 2008"
std::string prettify(std::string_view token) {
  std::string out;
  bool word_start = true;
  for (char c : token) {
    if (c == '_') {
      out.push_back(' ');
      word_start = true;
      continue;
    }
    out.push_back(word_start ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
    word_start = false;
  }
  return out;
}

// Every meaningful segment after the product, space separated.
std::optional<std::string> windows_generation(const CpeUri& cpe) {
  std::string out;
  auto add = [&](const std::string& seg) {
    if (seg.empty() || seg == "-") return;
    if (!out.empty()) out.push_back(' ');
    out += upper(seg);
  };
  if (cpe.version) add(*cpe.version);
  for (const auto& t : cpe.tail) add(t);
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace

OsIdentity describe_os_cpe(const CpeUri& cpe) {
  OsIdentity id;
  const std::string vendor = lower(cpe.vendor);
  const std::string product = lower(cpe.product);

  if (vendor == "microsoft" && product.starts_with("windows")) {
    id.os = "Windows";
    id.vendor = "Microsoft";
    std::string_view release = std::string_view(product).substr(7);
    if (release.starts_with("_")) release.remove_prefix(1);
    if (!release.empty()) id.family = release == "xp" ? std::string("XP") : prettify(release);
    id.generation = windows_generation(cpe);
    return id;
  }

  if (product == "linux_kernel" || product == "linux") {
    id.os = "Linux";
    id.vendor = "Linux";
    id.generation = cpe.version_token();
    return id;
  }

  for (const auto& d : kLinuxDistros) {
    if ((d.vendor == "*" || d.vendor == vendor) && d.product == product) {
      id.os = "Linux";
      id.vendor = "Linux";
      id.family = std::string(d.family);
      id.generation = cpe.version_token();
      return id;
    }
  }

  if (vendor == "apple" && (product == "mac_os_x" || product == "macos" || product == "mac_os")) {
    id.os = "Mac OS X";
    id.vendor = "Apple";
    id.family = "Mac OS X";
    id.generation = cpe.version_token();
    return id;
  }

  id.os = prettify(product);
  id.vendor = prettify(vendor);
  id.family = prettify(product);
  id.generation = cpe.version_token();
  return id;
}

bool is_generic_cpe(const CpeUri& cpe) {
  auto version = cpe.version_token();
  if (!version) return true;
  static const std::regex kernel_line(R"(\d+\.\d+)");
  return lower(cpe.product) == "linux_kernel" && cpe.version && std::regex_match(*cpe.version, kernel_line);
}

bool is_windows_xp(const CpeUri& cpe) {
  if (lower(cpe.product) == "windows_xp") return true;
  return cpe.version && lower(*cpe.version) == "xp";
}

}  // namespace testbed::scanmerge
