#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/flows/flow.hpp"

namespace testbed::flows {

inline constexpr std::string_view kFeatureCatalogVersion = "tb-flow-24/1";

inline constexpr std::array<std::string_view, 24> kFeatureNames{
    "duration_s",    "fwd_pkts",      "bwd_pkts",     "total_pkts",   "fwd_bytes",    "bwd_bytes",
    "total_bytes",   "pkts_per_s",    "bytes_per_s",  "pkt_len_mean", "pkt_len_min",  "pkt_len_max",
    "pkt_len_std",   "fwd_len_mean",  "fwd_len_min",  "fwd_len_max",  "fwd_len_std",  "bwd_len_mean",
    "bwd_len_std",   "iat_mean",      "iat_std",      "syn_count",    "rst_count",    "down_up_byte_ratio",
};

using FeatureVector = std::array<double, kFeatureNames.size()>;

/// Rates are 0 for zero-duration flows, as are the spread and IAT
/// statistics of single-packet flows.
FeatureVector compute_features(const FlowRecord& flow);

/// Column names shared by every flow CSV: the 5-tuple then the catalog.
std::vector<std::string> flow_csv_columns();

/// Values matching flow_csv_columns(). Count-valued features print as
/// integers, the rest with 6 significant digits.
std::vector<std::string> flow_csv_fields(const FlowRecord& flow);

/// Orders by first_ts, then key.
void sort_for_export(std::vector<FlowRecord>& flows);

/// Header plus one row per flow in sort_for_export order; the last column is
/// the label (empty when unlabeled).
std::string export_csv(std::span<const FlowRecord> flows);

/// "%.6g" rendering used by all flow CSVs.
std::string format_g6(double value);

}  // namespace testbed::flows
