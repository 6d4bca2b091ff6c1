#include "testbed/flows/features.hpp"

#include <algorithm>
#include <cstdio>

#include "testbed/common/csv.hpp"

namespace testbed::flows {

namespace {

// Catalog entries holding counts; exported without a decimal point.
constexpr std::array<bool, kFeatureNames.size()> kIntegral{
    false, true, true, true, true, true, true, false, false, false, false, false,
    false, false, false, false, false, false, false, false, false, true, true, false,
};

}  // namespace

FeatureVector compute_features(const FlowRecord& f) {
  const double duration = seconds_between(f.first_ts, f.last_ts);
  const double pkts = static_cast<double>(f.fwd_pkts + f.bwd_pkts);
  const double bytes = static_cast<double>(f.fwd_bytes + f.bwd_bytes);
  return {
      duration,
      static_cast<double>(f.fwd_pkts),
      static_cast<double>(f.bwd_pkts),
      pkts,
      static_cast<double>(f.fwd_bytes),
      static_cast<double>(f.bwd_bytes),
      bytes,
      duration > 0 ? pkts / duration : 0.0,
      duration > 0 ? bytes / duration : 0.0,
      f.lengths.mean(),
      f.lengths.min(),
      f.lengths.max(),
      f.lengths.stddev(),
      f.fwd_lengths.mean(),
      f.fwd_lengths.min(),
      f.fwd_lengths.max(),
      f.fwd_lengths.stddev(),
      f.bwd_lengths.mean(),
      f.bwd_lengths.stddev(),
      f.iat.mean(),
      f.iat.stddev(),
      static_cast<double>(f.syn_count),
      static_cast<double>(f.rst_count),
      f.fwd_bytes ? static_cast<double>(f.bwd_bytes) / static_cast<double>(f.fwd_bytes) : 0.0,
  };
}

std::string format_g6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::vector<std::string> flow_csv_columns() {
  std::vector<std::string> cols{"src_ip", "src_port", "dst_ip", "dst_port", "proto"};
  for (auto name : kFeatureNames) cols.emplace_back(name);
  return cols;
}

std::vector<std::string> flow_csv_fields(const FlowRecord& flow) {
  std::vector<std::string> out{flow.key.initiator_ip.to_string(), std::to_string(flow.key.initiator_port),
                               flow.key.responder_ip.to_string(), std::to_string(flow.key.responder_port),
                               proto_name(flow.key.proto)};
  const auto features = compute_features(flow);
  for (std::size_t i = 0; i < features.size(); ++i)
    out.push_back(kIntegral[i] ? std::to_string(static_cast<unsigned long long>(features[i]))
                               : format_g6(features[i]));
  return out;
}

void sort_for_export(std::vector<FlowRecord>& flows) {
  std::stable_sort(flows.begin(), flows.end(), [](const FlowRecord& a, const FlowRecord& b) {
    if (a.first_ts != b.first_ts) return a.first_ts < b.first_ts;
    return a.key < b.key;
  });
}

std::string export_csv(std::span<const FlowRecord> flows) {
  std::vector<FlowRecord> sorted(flows.begin(), flows.end());
  sort_for_export(sorted);

  auto header = flow_csv_columns();
  header.emplace_back("label");
  std::string out = csv::join(header) + "\n";
  for (const auto& f : sorted) {
    auto fields = flow_csv_fields(f);
    fields.push_back(f.label.value_or(""));
    out += csv::join(fields) + "\n";
  }
  return out;
}

}  // namespace testbed::flows
