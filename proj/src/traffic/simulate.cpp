#include "testbed/traffic/simulate.hpp"

#include <algorithm>
#include <optional>

#include "testbed/common/csv.hpp"
#include "testbed/common/random.hpp"
#include "testbed/flows/features.hpp"

namespace testbed::traffic {

namespace {

using flows::PacketMeta;

constexpr std::uint32_t kHeaderBytes = 54;  // Ethernet + IPv4 + TCP
constexpr std::uint32_t kMss = 1460;

Ipv4Addr address_of(const model::TestbedConfig& cfg, const std::string& name) {
  const auto* h = cfg.find_host(name);
  if (!h || h->nics.empty()) throw UnresolvedHost(name);
  return h->nics.front().ip;
}

// One TCP conversation between a client port and a server port, written
// straight into a flow accumulator.
class Conversation {
 public:
  Conversation(Rng& rng, Ipv4Addr client, std::uint16_t cport, Ipv4Addr server, std::uint16_t sport, Timestamp t)
      : rng_(rng), client_(client), server_(server), cport_(cport), sport_(sport), now_(t) {}

  Timestamp now() const { return now_; }
  void advance_to(Timestamp t) { now_ = std::max(now_, t); }

  void handshake() {
    send(true, 74, flows::kSyn);
    send(false, 74, flows::kSyn | flows::kAck);
    send(true, 66, flows::kAck);
  }

  void message(bool from_client, std::uint32_t bytes) {
    int unacked = 0;
    while (bytes > 0) {
      const auto chunk = std::min(bytes, kMss);
      send(from_client, kHeaderBytes + chunk, flows::kAck);
      bytes -= chunk;
      if (++unacked == 2 || bytes == 0) {
        send(!from_client, 66, flows::kAck);
        unacked = 0;
      }
    }
  }

  /// Both FINs; the last one lands exactly at `at` when given.
  void close(std::optional<Timestamp> at = std::nullopt) {
    if (at) {
      place(true, 66, flows::kFin | flows::kAck, *at - Micros{1});
      place(false, 66, flows::kFin | flows::kAck, *at);
    } else {
      send(true, 66, flows::kFin | flows::kAck);
      send(false, 66, flows::kFin | flows::kAck);
    }
  }

  flows::FlowRecord take() { return acc_->take(); }

 private:
  void send(bool from_client, std::uint32_t length, std::uint8_t flags) {
    if (acc_) now_ += Micros{rng_.uniform_int(40, 900)};
    place(from_client, length, flags, now_);
  }

  void place(bool from_client, std::uint32_t length, std::uint8_t flags, Timestamp t) {
    PacketMeta p;
    p.ts = t;
    p.src_ip = from_client ? client_ : server_;
    p.dst_ip = from_client ? server_ : client_;
    p.src_port = from_client ? cport_ : sport_;
    p.dst_port = from_client ? sport_ : cport_;
    p.proto = flows::kTcp;
    p.length = length;
    p.tcp_flags = flags;
    now_ = t;
    if (acc_)
      acc_->add(p);
    else
      acc_.emplace(p);
  }

  Rng& rng_;
  Ipv4Addr client_, server_;
  std::uint16_t cport_, sport_;
  Timestamp now_;
  std::optional<flows::FlowAccumulator> acc_;
};

std::uint32_t draw_u32(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return static_cast<std::uint32_t>(rng.uniform_int(lo, hi));
}

}  // namespace

SyntheticFlowLog simulate_jobs(std::span<const ScheduledJob> jobs, const model::TestbedConfig& cfg,
                               std::uint64_t seed) {
  SyntheticFlowLog log;
  for (const auto& job : jobs) {
    const auto client = address_of(cfg, job.host);
    const auto server = address_of(cfg, job.server);
    Rng rng(derive_seed(seed, job.job_id));
    const auto ephemeral = static_cast<std::uint16_t>(rng.uniform_int(32768, 60999));
    auto emit = [&](Conversation& c) { log.flows.push_back({c.take(), job.job_id, job.host, job.server, job.type}); };

    if (const auto* web = std::get_if<WebParams>(&job.params)) {
      Timestamp t = job.start_ts;
      for (int i = 0; i < web->n_requests; ++i) {
        if (i > 0) t += Micros{std::llround(web->waits[static_cast<std::size_t>(i - 1)] * 1e6)};
        const auto port = static_cast<std::uint16_t>(32768 + (ephemeral - 32768 + i) % 28232);
        Conversation c(rng, client, port, server, web->https ? 443 : 80, t);
        c.handshake();
        c.message(true, draw_u32(rng, 300, 700));
        c.message(false, draw_u32(rng, 2000, 200000));
        c.close();
        emit(c);
      }
    } else if (const auto* ssh = std::get_if<SshParams>(&job.params)) {
      const auto length = Micros{std::llround(ssh->session_seconds * 1e6)};
      const auto end = job.start_ts + length;
      Conversation c(rng, client, ephemeral, server, 22, job.start_ts);
      c.handshake();
      c.message(false, draw_u32(rng, 20, 40));    // banners
      c.message(true, draw_u32(rng, 20, 40));
      c.message(true, draw_u32(rng, 1000, 1800));  // key exchange
      c.message(false, draw_u32(rng, 1000, 1800));
      for (int i = 0; i < ssh->n_commands; ++i) {
        c.advance_to(job.start_ts + length * (i + 1) / (ssh->n_commands + 1));
        c.message(true, draw_u32(rng, 60, 120));
        c.message(false, draw_u32(rng, 100, 4000));
      }
      c.close(end);
      emit(c);
    } else if (const auto* files = std::get_if<FileParams>(&job.params)) {
      const bool smb = job.type == JobType::SMB;
      Conversation c(rng, client, ephemeral, server, smb ? 445 : 22, job.start_ts);
      c.handshake();
      c.message(true, draw_u32(rng, 150, 300));  // negotiate / banner
      c.message(false, draw_u32(rng, 150, 300));
      for (auto size : files->sizes) {
        const bool upload = rng.uniform_int(0, 1) == 1;
        c.message(true, draw_u32(rng, 100, 200));  // request
        c.message(upload, static_cast<std::uint32_t>(size));
      }
      c.close();
      emit(c);
    }
  }
  return log;
}

std::string export_synthetic_csv(const SyntheticFlowLog& log) {
  std::vector<std::string> header{"job_id", "host", "server", "job_type"};
  for (auto& c : flows::flow_csv_columns()) header.push_back(std::move(c));
  std::string out = csv::join(header) + "\n";
  for (const auto& f : log.flows) {
    std::vector<std::string> row{f.job_id, f.host, f.server, std::string(to_string(f.job_type))};
    for (auto& v : flows::flow_csv_fields(f.flow)) row.push_back(std::move(v));
    out += csv::join(row) + "\n";
  }
  return out;
}

}  // namespace testbed::traffic
