#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "testbed/flows/packet.hpp"

namespace testbed::flows {

/// Count, min, max, mean and population standard deviation (Welford).
class RunningStats {
 public:
  void add(double x);

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return n_ ? mean_ : 0.0; }
  double min() const noexcept { return n_ ? min_ : 0.0; }
  double max() const noexcept { return n_ ? max_ : 0.0; }
  double stddev() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct FlowKey {
  Ipv4Addr initiator_ip;
  std::uint16_t initiator_port = 0;
  Ipv4Addr responder_ip;
  std::uint16_t responder_port = 0;
  std::uint8_t proto = kTcp;

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct FlowRecord {
  FlowKey key;
  Timestamp first_ts{};
  Timestamp last_ts{};
  std::uint64_t fwd_pkts = 0;
  std::uint64_t bwd_pkts = 0;
  std::uint64_t fwd_bytes = 0;
  std::uint64_t bwd_bytes = 0;
  RunningStats fwd_lengths;
  RunningStats bwd_lengths;
  RunningStats lengths;
  // Inter-arrival times in seconds.
  RunningStats fwd_iat;
  RunningStats bwd_iat;
  RunningStats iat;
  std::uint64_t syn_count = 0;
  std::uint64_t fin_count = 0;
  std::uint64_t rst_count = 0;
  std::uint64_t ack_count = 0;
  std::optional<std::string> label;
};

/// Builds one FlowRecord packet by packet. The first packet fixes the key's
/// initiator; later packets are forward when they come from it.
class FlowAccumulator {
 public:
  explicit FlowAccumulator(const PacketMeta& first);

  void add(const PacketMeta& pkt);
  bool is_forward(const PacketMeta& pkt) const noexcept;

  /// TCP teardown seen: a RST, or a FIN from each side.
  bool closed() const noexcept { return rst_seen_ || (fin_fwd_ && fin_bwd_); }

  const FlowRecord& record() const noexcept { return rec_; }
  FlowRecord take() { return std::move(rec_); }

 private:
  FlowRecord rec_;
  std::optional<Timestamp> last_fwd_;
  std::optional<Timestamp> last_bwd_;
  bool fin_fwd_ = false;
  bool fin_bwd_ = false;
  bool rst_seen_ = false;
};

inline constexpr double kDefaultIdleTimeoutS = 120.0;

/// Groups packets into bidirectional 5-tuple flows. Packets are taken in
/// timestamp order (stable). A flow ends on TCP teardown or when the gap to
/// its previous packet exceeds the idle timeout; the next packet on the same
/// endpoints opens a new flow. Flows are returned in order of first packet.
std::vector<FlowRecord> assemble_flows(std::span<const PacketMeta> packets,
                                       double idle_timeout_s = kDefaultIdleTimeoutS);

}  // namespace testbed::flows
