#include "testbed/flows/capture.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "testbed/common/csv.hpp"

namespace testbed::flows {

namespace {

constexpr std::uint32_t kMagicMicro = 0xa1b2c3d4;
constexpr std::uint32_t kMagicNano = 0xa1b23c4d;
constexpr std::uint32_t kLinkEthernet = 1;
constexpr std::uint32_t kLinkRaw = 101;
constexpr std::uint32_t kLinkIpv4 = 228;
constexpr std::size_t kFileHeader = 24;
constexpr std::size_t kRecordHeader = 16;

std::uint32_t load32(const unsigned char* p, bool swap) {
  std::uint32_t le = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                     std::uint32_t(p[3]) << 24;
  std::uint32_t be = std::uint32_t(p[3]) | std::uint32_t(p[2]) << 8 | std::uint32_t(p[1]) << 16 |
                     std::uint32_t(p[0]) << 24;
  return swap ? be : le;
}

std::uint16_t be16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }
std::uint32_t be32(const unsigned char* p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 | p[3];
}

// Decodes the IPv4 datagram at `ip`; false when the frame is not usable.
bool decode_ipv4(const unsigned char* ip, std::size_t len, PacketMeta& pkt) {
  if (len < 20 || (ip[0] >> 4) != 4) return false;
  const std::size_t ihl = std::size_t(ip[0] & 0x0f) * 4;
  if (ihl < 20 || len < ihl) return false;
  if ((be16(ip + 6) & 0x1fff) != 0) return false;  // non-first fragment: no transport header

  pkt.proto = ip[9];
  pkt.src_ip = Ipv4Addr{be32(ip + 12)};
  pkt.dst_ip = Ipv4Addr{be32(ip + 16)};
  const unsigned char* l4 = ip + ihl;
  const std::size_t l4len = len - ihl;

  if (pkt.proto == kTcp) {
    if (l4len < 14) return false;
    pkt.src_port = be16(l4);
    pkt.dst_port = be16(l4 + 2);
    const unsigned char f = l4[13];
    pkt.tcp_flags = static_cast<std::uint8_t>(((f & 0x02) ? kSyn : 0) | ((f & 0x01) ? kFin : 0) |
                                              ((f & 0x04) ? kRst : 0) | ((f & 0x10) ? kAck : 0));
  } else if (pkt.proto == kUdp) {
    if (l4len < 4) return false;
    pkt.src_port = be16(l4);
    pkt.dst_port = be16(l4 + 2);
  }
  return true;
}

Capture read_pcap(std::string_view bytes) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < kFileHeader) throw CaptureFormatError(0, "truncated pcap file header");

  bool swap = false;
  bool nanos = false;
  const auto magic = load32(data, false);
  if (magic == kMagicMicro || magic == kMagicNano) {
    nanos = magic == kMagicNano;
  } else {
    const auto swapped = load32(data, true);
    if (swapped != kMagicMicro && swapped != kMagicNano) throw CaptureFormatError(0, "bad pcap magic");
    swap = true;
    nanos = swapped == kMagicNano;
  }
  const auto linktype = load32(data + 20, swap) & 0x0fffffff;
  if (linktype != kLinkEthernet && linktype != kLinkRaw && linktype != kLinkIpv4)
    throw CaptureFormatError(20, "unsupported linktype " + std::to_string(linktype));

  Capture out;
  std::size_t pos = kFileHeader;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kRecordHeader) throw CaptureFormatError(pos, "truncated record header");
    const auto sec = load32(data + pos, swap);
    const auto frac = load32(data + pos + 4, swap);
    const auto caplen = load32(data + pos + 8, swap);
    const auto origlen = load32(data + pos + 12, swap);
    if (caplen > bytes.size() - pos - kRecordHeader) throw CaptureFormatError(pos, "truncated record data");
    const unsigned char* frame = data + pos + kRecordHeader;

    PacketMeta pkt;
    pkt.ts = from_epoch_us(std::int64_t(sec) * 1000000 + (nanos ? frac / 1000 : frac));
    pkt.length = origlen;

    bool ok = false;
    if (linktype == kLinkEthernet) {
      std::size_t off = 12;
      if (caplen >= 14) {
        auto ethertype = be16(frame + off);
        if (ethertype == 0x8100 && caplen >= 18) {
          off += 4;
          ethertype = be16(frame + off);
        }
        if (ethertype == 0x0800) ok = decode_ipv4(frame + off + 2, caplen - off - 2, pkt);
      }
    } else {
      ok = decode_ipv4(frame, caplen, pkt);
    }
    if (ok)
      out.packets.push_back(pkt);
    else
      ++out.skipped;
    pos += kRecordHeader + caplen;
  }
  return out;
}

template <typename T>
bool parse_uint(std::string_view text, T& out) {
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return !text.empty() && ec == std::errc() && end == text.data() + text.size();
}

Capture read_packet_csv(std::string_view bytes) {
  static const std::vector<std::string> kHeader{"ts_us", "src_ip", "src_port", "dst_ip",
                                                "dst_port", "proto", "length", "flags"};
  csv::Table table(bytes, kHeader);
  Capture out;
  for (const auto& row : table.rows()) {
    auto bad = [&](const char* column) {
      return csv::CsvError(row.line, std::string("bad ") + column + " '" + table.field(row, column) + "'");
    };
    PacketMeta pkt;
    std::int64_t ts = 0;
    if (!parse_uint(table.field(row, "ts_us"), ts)) throw bad("ts_us");
    pkt.ts = from_epoch_us(ts);
    auto src = Ipv4Addr::try_parse(table.field(row, "src_ip"));
    auto dst = Ipv4Addr::try_parse(table.field(row, "dst_ip"));
    if (!src) throw bad("src_ip");
    if (!dst) throw bad("dst_ip");
    pkt.src_ip = *src;
    pkt.dst_ip = *dst;
    if (!parse_uint(table.field(row, "src_port"), pkt.src_port)) throw bad("src_port");
    if (!parse_uint(table.field(row, "dst_port"), pkt.dst_port)) throw bad("dst_port");
    if (!parse_proto(table.field(row, "proto"), pkt.proto)) throw bad("proto");
    if (!parse_uint(table.field(row, "length"), pkt.length)) throw bad("length");
    if (!parse_flags(table.field(row, "flags"), pkt.tcp_flags)) throw bad("flags");
    if (pkt.proto != kTcp) pkt.tcp_flags = 0;
    out.packets.push_back(pkt);
  }
  return out;
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}
void put16be(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v >> 8);
  out += static_cast<char>(v & 0xff);
}
void put32be(std::string& out, std::uint32_t v) {
  put16be(out, static_cast<std::uint16_t>(v >> 16));
  put16be(out, static_cast<std::uint16_t>(v & 0xffff));
}

}  // namespace

Capture read_capture(std::string_view bytes, CaptureFormat format) {
  return format == CaptureFormat::Pcap ? read_pcap(bytes) : read_packet_csv(bytes);
}

std::string write_pcap(std::span<const PacketMeta> packets) {
  std::string out;
  put32(out, kMagicMicro);
  out += '\x02';
  out += '\x00';
  out += '\x04';
  out += '\x00';
  put32(out, 0);
  put32(out, 0);
  put32(out, 65535);
  put32(out, kLinkEthernet);

  for (const auto& p : packets) {
    const std::uint32_t l4 = p.proto == kTcp ? 20 : p.proto == kUdp ? 8 : 0;
    const std::uint32_t caplen = 14 + 20 + l4;
    if (p.length < caplen) throw std::invalid_argument("packet length " + std::to_string(p.length) +
                                                       " does not cover its headers");
    const auto us = epoch_us(p.ts);
    if (us < 0) throw std::invalid_argument("pcap timestamps must not precede the epoch");
    put32(out, static_cast<std::uint32_t>(us / 1000000));
    put32(out, static_cast<std::uint32_t>(us % 1000000));
    put32(out, caplen);
    put32(out, p.length);

    out.append(12, '\x00');  // MAC addresses
    put16be(out, 0x0800);
    out += '\x45';
    out += '\x00';
    put16be(out, static_cast<std::uint16_t>(std::min<std::uint32_t>(p.length - 14, 0xffff)));
    put32be(out, 0);  // id, flags, fragment offset
    out += '\x40';
    out += static_cast<char>(p.proto);
    put16be(out, 0);  // checksum left blank
    put32be(out, p.src_ip.value());
    put32be(out, p.dst_ip.value());
    if (p.proto == kTcp) {
      put16be(out, p.src_port);
      put16be(out, p.dst_port);
      put32be(out, 0);
      put32be(out, 0);
      out += '\x50';
      const auto f = p.tcp_flags;
      out += static_cast<char>(((f & kSyn) ? 0x02 : 0) | ((f & kFin) ? 0x01 : 0) | ((f & kRst) ? 0x04 : 0) |
                               ((f & kAck) ? 0x10 : 0));
      put16be(out, 65535);
      put32be(out, 0);
    } else if (p.proto == kUdp) {
      put16be(out, p.src_port);
      put16be(out, p.dst_port);
      put16be(out, static_cast<std::uint16_t>(std::min<std::uint32_t>(p.length - 34, 0xffff)));
      put16be(out, 0);
    }
  }
  return out;
}

std::string write_packet_csv(std::span<const PacketMeta> packets) {
  std::string out = "ts_us,src_ip,src_port,dst_ip,dst_port,proto,length,flags\n";
  for (const auto& p : packets) {
    out += std::to_string(epoch_us(p.ts)) + ',' + p.src_ip.to_string() + ',' + std::to_string(p.src_port) + ',' +
           p.dst_ip.to_string() + ',' + std::to_string(p.dst_port) + ',' + proto_name(p.proto) + ',' +
           std::to_string(p.length) + ',' + flags_to_string(p.tcp_flags) + '\n';
  }
  return out;
}

}  // namespace testbed::flows
