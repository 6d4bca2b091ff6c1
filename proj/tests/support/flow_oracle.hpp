#pragma once

// Brute-force flow grouping: for every distinct canonical key, rescan the
// whole (time-ordered) capture and cut segments on idle gaps and teardown.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "testbed/flows/packet.hpp"

namespace testsupport {

struct OracleFlow {
  std::size_t first_index = 0;  // position of its first packet in time order
  std::uint64_t fwd = 0;
  std::uint64_t bwd = 0;
};

inline std::vector<OracleFlow> oracle_flows(std::vector<testbed::flows::PacketMeta> pkts, std::int64_t timeout_us) {
  using testbed::flows::PacketMeta;
  std::stable_sort(pkts.begin(), pkts.end(), [](const PacketMeta& a, const PacketMeta& b) { return a.ts < b.ts; });

  auto key_of = [](const PacketMeta& p) {
    auto a = std::make_tuple(p.src_ip.value(), p.src_port);
    auto b = std::make_tuple(p.dst_ip.value(), p.dst_port);
    return std::make_tuple(std::min(a, b), std::max(a, b), p.proto);
  };
  std::set<decltype(key_of(pkts[0]))> keys;
  for (const auto& p : pkts) keys.insert(key_of(p));

  std::vector<OracleFlow> out;
  for (const auto& k : keys) {
    bool open = false;
    OracleFlow cur;
    std::uint32_t init_ip = 0;
    std::uint16_t init_port = 0;
    std::int64_t last = 0;
    bool fin_f = false, fin_b = false, rst = false;
    for (std::size_t i = 0; i < pkts.size(); ++i) {
      const auto& p = pkts[i];
      if (key_of(p) != k) continue;
      const auto t = testbed::epoch_us(p.ts);
      const bool closed = rst || (fin_f && fin_b);
      if (open && (closed || t - last > timeout_us)) {
        out.push_back(cur);
        open = false;
      }
      if (!open) {
        open = true;
        cur = OracleFlow{i, 0, 0};
        init_ip = p.src_ip.value();
        init_port = p.src_port;
        fin_f = fin_b = rst = false;
      }
      const bool fwd = p.src_ip.value() == init_ip && p.src_port == init_port;
      (fwd ? cur.fwd : cur.bwd) += 1;
      if (p.tcp_flags & testbed::flows::kRst) rst = true;
      if (p.tcp_flags & testbed::flows::kFin) (fwd ? fin_f : fin_b) = true;
      last = t;
    }
    if (open) out.push_back(cur);
  }
  std::sort(out.begin(), out.end(), [](const OracleFlow& a, const OracleFlow& b) { return a.first_index < b.first_index; });
  return out;
}

}  // namespace testsupport
