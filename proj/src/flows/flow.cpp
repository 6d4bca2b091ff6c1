#include "testbed/flows/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace testbed::flows {

void RunningStats::add(double x) {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::stddev() const noexcept {
  if (n_ < 2) return 0.0;
  return std::sqrt(std::max(0.0, m2_ / static_cast<double>(n_)));
}

FlowAccumulator::FlowAccumulator(const PacketMeta& first) {
  rec_.key = {first.src_ip, first.src_port, first.dst_ip, first.dst_port, first.proto};
  rec_.first_ts = rec_.last_ts = first.ts;
  add(first);
}

bool FlowAccumulator::is_forward(const PacketMeta& pkt) const noexcept {
  return pkt.src_ip == rec_.key.initiator_ip && pkt.src_port == rec_.key.initiator_port;
}

void FlowAccumulator::add(const PacketMeta& pkt) {
  const bool fwd = is_forward(pkt);
  const double len = static_cast<double>(pkt.length);

  if (rec_.fwd_pkts + rec_.bwd_pkts > 0) rec_.iat.add(seconds_between(rec_.last_ts, pkt.ts));
  auto& last_dir = fwd ? last_fwd_ : last_bwd_;
  if (last_dir) (fwd ? rec_.fwd_iat : rec_.bwd_iat).add(seconds_between(*last_dir, pkt.ts));
  last_dir = pkt.ts;

  if (fwd) {
    ++rec_.fwd_pkts;
    rec_.fwd_bytes += pkt.length;
    rec_.fwd_lengths.add(len);
  } else {
    ++rec_.bwd_pkts;
    rec_.bwd_bytes += pkt.length;
    rec_.bwd_lengths.add(len);
  }
  rec_.lengths.add(len);
  rec_.last_ts = std::max(rec_.last_ts, pkt.ts);

  if (pkt.has(kSyn)) ++rec_.syn_count;
  if (pkt.has(kAck)) ++rec_.ack_count;
  if (pkt.has(kRst)) {
    ++rec_.rst_count;
    rst_seen_ = true;
  }
  if (pkt.has(kFin)) {
    ++rec_.fin_count;
    (fwd ? fin_fwd_ : fin_bwd_) = true;
  }
}

std::vector<FlowRecord> assemble_flows(std::span<const PacketMeta> packets, double idle_timeout_s) {
  std::vector<const PacketMeta*> order;
  order.reserve(packets.size());
  for (const auto& p : packets) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->ts < b->ts; });

  const auto timeout = std::chrono::microseconds(std::llround(idle_timeout_s * 1e6));
  using Endpoint = std::pair<std::uint32_t, std::uint16_t>;
  using Canonical = std::tuple<Endpoint, Endpoint, std::uint8_t>;
  auto canonical = [](const PacketMeta& p) {
    Endpoint a{p.src_ip.value(), p.src_port};
    Endpoint b{p.dst_ip.value(), p.dst_port};
    if (b < a) std::swap(a, b);
    return Canonical{a, b, p.proto};
  };

  // Flows are kept in creation order; `open` indexes the live one per key.
  std::vector<FlowAccumulator> flows;
  std::map<Canonical, std::size_t> open;

  for (const auto* p : order) {
    const auto key = canonical(*p);
    auto it = open.find(key);
    if (it != open.end() && p->ts - flows[it->second].record().last_ts > timeout) {
      open.erase(it);
      it = open.end();
    }
    if (it == open.end()) {
      flows.emplace_back(*p);
      it = open.emplace(key, flows.size() - 1).first;
    } else {
      flows[it->second].add(*p);
    }
    if (flows[it->second].closed()) open.erase(it);
  }

  std::vector<FlowRecord> out;
  out.reserve(flows.size());
  for (auto& f : flows) out.push_back(f.take());
  return out;
}

}  // namespace testbed::flows
