#include "testbed/flows/windows.hpp"

#include <cmath>

#include "testbed/common/csv.hpp"

namespace testbed::flows {

namespace {

bool endpoints_match(const AttackWindow& w, Ipv4Addr a, Ipv4Addr b) {
  return (w.attacker.contains(a) && w.victim.contains(b)) || (w.attacker.contains(b) && w.victim.contains(a));
}

}  // namespace

std::vector<AttackWindow> load_attack_windows(std::string_view document, const model::TestbedConfig* cfg) {
  csv::Table table(document, {"name", "attacker", "victim", "start_iso8601", "end_iso8601"});
  std::vector<AttackWindow> out;
  for (const auto& row : table.rows()) {
    auto endpoint = [&](const char* column) {
      const auto& text = table.field(row, column);
      if (auto ip = Ipv4Addr::try_parse(text)) return Ipv4Prefix::host(*ip);
      if (auto prefix = Ipv4Prefix::try_parse(text)) return *prefix;
      if (cfg)
        if (const auto* vlan = cfg->find_vlan(text)) return vlan->cidr;
      throw csv::CsvError(row.line, std::string(column) + " '" + text + "' is not an address, prefix or vlan");
    };
    auto when = [&](const char* column) {
      const auto& text = table.field(row, column);
      auto ts = parse_iso8601(text);
      if (!ts) throw csv::CsvError(row.line, std::string(column) + " '" + text + "' is not an ISO 8601 timestamp");
      return *ts;
    };

    AttackWindow w{table.field(row, "name"), endpoint("attacker"), endpoint("victim"), when("start_iso8601"),
                   when("end_iso8601")};
    if (w.name.empty()) throw csv::CsvError(row.line, "empty window name");
    if (!(w.start < w.end)) throw csv::CsvError(row.line, "window start must precede its end");
    out.push_back(std::move(w));
  }
  return out;
}

WindowStats window_stats(std::span<const PacketMeta> packets, const AttackWindow& window) {
  WindowStats s;
  Timestamp first{}, last{};
  for (const auto& p : packets) {
    if (p.ts < window.start || p.ts > window.end || !endpoints_match(window, p.src_ip, p.dst_ip)) continue;
    if (s.n_pkts == 0) {
      first = last = p.ts;
    } else {
      first = std::min(first, p.ts);
      last = std::max(last, p.ts);
    }
    ++s.n_pkts;
    s.total_bytes += p.length;
  }
  if (s.n_pkts == 0) throw EmptyWindow(window.name);

  s.duration_s = seconds_between(first, last);
  s.avg_pps = s.duration_s > 0 ? static_cast<double>(s.n_pkts) / s.duration_s : 0.0;
  s.avg_size_b = std::llround(static_cast<double>(s.total_bytes) / static_cast<double>(s.n_pkts));
  return s;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

nlohmann::ordered_json to_json(const AttackWindow& window, const WindowStats& stats) {
  return {{"name", window.name},
          {"attacker", window.attacker.to_string()},
          {"victim", window.victim.to_string()},
          {"duration_s", round_to(stats.duration_s, 1)},
          {"n_pkts", stats.n_pkts},
          {"avg_pps", round_to(stats.avg_pps, 2)},
          {"avg_size_b", stats.avg_size_b}};
}

std::vector<FlowRecord> label_flows(std::vector<FlowRecord> flows, std::span<const AttackWindow> windows) {
  for (auto& f : flows) {
    const AttackWindow* hit = nullptr;
    for (const auto& w : windows) {
      if (!endpoints_match(w, f.key.initiator_ip, f.key.responder_ip)) continue;
      if (f.first_ts > w.end || f.last_ts < w.start) continue;
      if (hit)
        throw AmbiguousLabel("flow " + f.key.initiator_ip.to_string() + " -> " + f.key.responder_ip.to_string() +
                             " matches windows '" + hit->name + "' and '" + w.name + "'");
      hit = &w;
    }
    f.label = hit ? hit->name : std::string(kBenignLabel);
  }
  return flows;
}

}  // namespace testbed::flows
