#include "testbed/flows/packet.hpp"

#include <charconv>

namespace testbed::flows {

std::string proto_name(std::uint8_t proto) {
  if (proto == kTcp) return "TCP";
  if (proto == kUdp) return "UDP";
  return std::to_string(proto);
}

bool parse_proto(std::string_view text, std::uint8_t& out) {
  if (text == "TCP" || text == "tcp") {
    out = kTcp;
    return true;
  }
  if (text == "UDP" || text == "udp") {
    out = kUdp;
    return true;
  }
  unsigned value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() || value > 255) return false;
  out = static_cast<std::uint8_t>(value);
  return true;
}

std::string flags_to_string(std::uint8_t flags) {
  std::string out;
  if (flags & kSyn) out += 'S';
  if (flags & kFin) out += 'F';
  if (flags & kRst) out += 'R';
  if (flags & kAck) out += 'A';
  return out;
}

bool parse_flags(std::string_view text, std::uint8_t& out) {
  std::uint8_t flags = 0;
  for (char c : text) {
    switch (c) {
      case 'S': flags |= kSyn; break;
      case 'F': flags |= kFin; break;
      case 'R': flags |= kRst; break;
      case 'A': flags |= kAck; break;
      default: return false;
    }
  }
  out = flags;
  return true;
}

}  // namespace testbed::flows
