#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "testbed/common/error.hpp"

namespace testbed {

/// IPv4 address held in host byte order.
class Ipv4Addr {
 public:
  constexpr Ipv4Addr() = default;
  constexpr explicit Ipv4Addr(std::uint32_t value) : value_(value) {}
  constexpr Ipv4Addr(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

  /// Strict dotted-quad: four decimal octets, no leading '+', no whitespace.
  static std::optional<Ipv4Addr> try_parse(std::string_view text);
  static Ipv4Addr parse(std::string_view text);

  constexpr std::uint32_t value() const noexcept { return value_; }
  std::string to_string() const;

  friend constexpr auto operator<=>(Ipv4Addr, Ipv4Addr) = default;

 private:
  std::uint32_t value_ = 0;
};

/// Address plus prefix length. The address is stored as written, so a prefix
/// with host bits set survives parsing and can be reported by validation.
class Ipv4Prefix {
 public:
  constexpr Ipv4Prefix() = default;
  constexpr Ipv4Prefix(Ipv4Addr addr, int length) : addr_(addr), length_(length) {}

  static std::optional<Ipv4Prefix> try_parse(std::string_view text);
  static Ipv4Prefix parse(std::string_view text);
  static constexpr Ipv4Prefix host(Ipv4Addr addr) { return {addr, 32}; }

  constexpr Ipv4Addr address() const noexcept { return addr_; }
  constexpr int length() const noexcept { return length_; }
  constexpr std::uint32_t mask() const noexcept {
    return length_ == 0 ? 0u : ~std::uint32_t{0} << (32 - length_);
  }
  constexpr Ipv4Addr network() const noexcept { return Ipv4Addr{addr_.value() & mask()}; }
  constexpr Ipv4Addr broadcast() const noexcept { return Ipv4Addr{addr_.value() | ~mask()}; }
  constexpr bool is_canonical() const noexcept { return (addr_.value() & ~mask()) == 0; }
  constexpr bool contains(Ipv4Addr ip) const noexcept {
    return (ip.value() & mask()) == (addr_.value() & mask());
  }
  std::string to_string() const;

  friend constexpr bool operator==(Ipv4Prefix, Ipv4Prefix) = default;

 private:
  Ipv4Addr addr_;
  int length_ = 0;
};

}  // namespace testbed
