#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "testbed/common/error.hpp"
#include "testbed/flows/flow.hpp"
#include "testbed/model/config.hpp"

namespace testbed::flows {

/// An attack instance. Attacker and victim are prefixes: a single address is
/// a /32, a VLAN token stands for the VLAN's network.
struct AttackWindow {
  std::string name;
  Ipv4Prefix attacker;
  Ipv4Prefix victim;
  Timestamp start{};
  Timestamp end{};
};

/// CSV `name,attacker,victim,start_iso8601,end_iso8601`. Endpoints are an
/// IPv4 address, a prefix, or a VLAN name looked up in `cfg` (when given).
std::vector<AttackWindow> load_attack_windows(std::string_view document, const model::TestbedConfig* cfg = nullptr);

struct WindowStats {
  double duration_s = 0;
  std::uint64_t n_pkts = 0;
  std::uint64_t total_bytes = 0;
  double avg_pps = 0;  // unrounded; 0 for a zero-length window
  std::int64_t avg_size_b = 0;
};

class EmptyWindow : public Error {
 public:
  explicit EmptyWindow(const std::string& name)
      : Error(ErrorKind::Domain, "no packets match attack window '" + name + "'") {}
};

/// Packets inside [start, end] between attacker and victim in either
/// direction. Duration runs from the first to the last matching packet.
WindowStats window_stats(std::span<const PacketMeta> packets, const AttackWindow& window);

/// Half-away-from-zero rounding to `decimals` places, as printed in tables.
double round_to(double value, int decimals);

/// Duration at 1 decimal, rate at 2, size as an integer.
nlohmann::ordered_json to_json(const AttackWindow& window, const WindowStats& stats);

inline constexpr std::string_view kBenignLabel = "benign";

class AmbiguousLabel : public Error {
 public:
  explicit AmbiguousLabel(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// Labels each flow with the window whose endpoints match it (either
/// orientation) and whose interval overlaps the flow's, bounds inclusive.
/// Unmatched flows get kBenignLabel; two matching windows throw.
std::vector<FlowRecord> label_flows(std::vector<FlowRecord> flows, std::span<const AttackWindow> windows);

}  // namespace testbed::flows
