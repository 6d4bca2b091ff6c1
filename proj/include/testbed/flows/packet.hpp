#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "testbed/common/ipv4.hpp"
#include "testbed/common/time.hpp"

namespace testbed::flows {

// IP protocol numbers; anything else is carried through as its raw code.
inline constexpr std::uint8_t kTcp = 6;
inline constexpr std::uint8_t kUdp = 17;

enum TcpFlag : std::uint8_t { kSyn = 1, kFin = 2, kRst = 4, kAck = 8 };

struct PacketMeta {
  Timestamp ts{};
  Ipv4Addr src_ip;
  Ipv4Addr dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t proto = kTcp;
  std::uint32_t length = 0;     // frame length as recorded by the capture
  std::uint8_t tcp_flags = 0;  // TcpFlag bits, TCP only

  bool has(TcpFlag f) const noexcept { return proto == kTcp && (tcp_flags & f) != 0; }
  friend bool operator==(const PacketMeta&, const PacketMeta&) = default;
};

/// "TCP", "UDP", or the decimal protocol number.
std::string proto_name(std::uint8_t proto);

/// Inverse of proto_name; also accepts lower case and decimal codes 0-255.
bool parse_proto(std::string_view text, std::uint8_t& out);

/// Flag letters in SFRA order, e.g. "SA".
std::string flags_to_string(std::uint8_t flags);

/// Letters from "SFRA" in any order; false on any other character.
bool parse_flags(std::string_view text, std::uint8_t& out);

}  // namespace testbed::flows
