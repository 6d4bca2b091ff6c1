#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/error.hpp"
#include "testbed/flows/packet.hpp"

namespace testbed::flows {

enum class CaptureFormat { Pcap, PacketCsv };

class CaptureFormatError : public SyntaxError {
 public:
  CaptureFormatError(std::size_t offset, const std::string& what)
      : SyntaxError("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct Capture {
  std::vector<PacketMeta> packets;
  std::size_t skipped = 0;  // non-IPv4 frames, non-first fragments, short headers
};

/// Pcap: classic libpcap, either byte order, microsecond or nanosecond
/// magic, linktype Ethernet (one 802.1Q tag allowed) or raw IPv4.
/// PacketCsv: header `ts_us,src_ip,src_port,dst_ip,dst_port,proto,length,flags`.
Capture read_capture(std::string_view bytes, CaptureFormat format);

/// Little-endian microsecond pcap with Ethernet framing. Only headers are
/// stored (caplen); each record's original length is the packet length,
/// which must cover the headers.
std::string write_pcap(std::span<const PacketMeta> packets);

std::string write_packet_csv(std::span<const PacketMeta> packets);

}  // namespace testbed::flows
