#include "testbed/common/ipv4.hpp"

#include <charconv>

namespace testbed {

namespace {

std::optional<unsigned> parse_decimal(std::string_view text, unsigned max_value) {
  if (text.empty() || text.size() > 3) return std::nullopt;
  // Leading zeros are rejected to avoid the octal ambiguity of inet_aton.
  if (text.size() > 1 && text.front() == '0') return std::nullopt;
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value > max_value) return std::nullopt;
  return value;
}

}  // namespace

std::optional<Ipv4Addr> Ipv4Addr::try_parse(std::string_view text) {
  std::uint32_t value = 0;
  for (int octet = 0; octet < 4; ++octet) {
    auto dot = text.find('.');
    if ((octet < 3) == (dot == std::string_view::npos)) return std::nullopt;
    auto part = parse_decimal(text.substr(0, dot), 255);
    if (!part) return std::nullopt;
    value = (value << 8) | *part;
    text = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  }
  return Ipv4Addr{value};
}

Ipv4Addr Ipv4Addr::parse(std::string_view text) {
  if (auto addr = try_parse(text)) return *addr;
  throw SyntaxError("invalid IPv4 address '" + std::string(text) + "'");
}

std::string Ipv4Addr::to_string() const {
  return std::to_string(value_ >> 24) + '.' + std::to_string((value_ >> 16) & 0xff) + '.' +
         std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
}

std::optional<Ipv4Prefix> Ipv4Prefix::try_parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto addr = Ipv4Addr::try_parse(text.substr(0, slash));
  auto length = parse_decimal(text.substr(slash + 1), 32);
  if (!addr || !length) return std::nullopt;
  return Ipv4Prefix{*addr, static_cast<int>(*length)};
}

Ipv4Prefix Ipv4Prefix::parse(std::string_view text) {
  if (auto prefix = try_parse(text)) return *prefix;
  throw SyntaxError("invalid IPv4 prefix '" + std::string(text) + "'");
}

std::string Ipv4Prefix::to_string() const {
  return addr_.to_string() + '/' + std::to_string(length_);
}

}  // namespace testbed
