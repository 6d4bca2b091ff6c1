#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace testbed::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kIoError = 1, kSyntaxError = 2, kValidationError = 3, kInternalError = 4 };

/// Maps an exception to the process exit status.
int exit_code_for(const std::exception& e);

/// Whole file as bytes; IoError when it cannot be read.
std::string read_file(const std::filesystem::path& path);

enum class OutputFormat { Json, Csv };

struct CommonArgs {
  std::uint64_t seed = 0;
  std::filesystem::path out;  // empty: print to stdout where supported
  OutputFormat format = OutputFormat::Json;
};

struct MergeScansArgs {
  std::vector<std::filesystem::path> nmap;
  std::vector<std::filesystem::path> openvas;
};

struct ConfigArgs {
  std::filesystem::path config;
  std::vector<std::string> nodes{"node1", "node2"};
};

struct RouteCheckArgs {
  std::filesystem::path config;
  std::string src;
  std::string dst;
  std::string proto = "tcp";
  std::optional<int> port;
};

struct ScheduleArgs {
  std::filesystem::path config;
  std::filesystem::path profiles;
  std::string date = "2018-07-25";
};

struct FlowArgs {
  std::filesystem::path capture;
  std::optional<std::string> capture_format;  // "pcap" or "csv"; default by extension
  std::optional<std::filesystem::path> windows;
  std::optional<std::filesystem::path> config;  // resolves VLAN names in windows
  double idle_timeout_s = 120.0;
};

struct PipelineArgs {
  std::filesystem::path config;
  std::filesystem::path profiles;
  std::filesystem::path windows;
  std::string date = "2018-07-25";
  std::vector<std::string> nodes{"node1", "node2"};
};

// Each command returns an exit status. Diagnostics go to `err`, reports that
// are not written to --out go to `out`. Exceptions are mapped by the caller.
int cmd_merge_scans(const MergeScansArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_validate(const ConfigArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_plan(const ConfigArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_sniffers(const ConfigArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_route_check(const RouteCheckArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_schedule(const ScheduleArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_simulate(const ScheduleArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_flows_extract(const FlowArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_flows_label(const FlowArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);
int cmd_stats(const FlowArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);

/// Writes plan.json, sniffers.json, schedule.jsonl, synthetic_flows.csv,
/// labeled_flows.csv and manifest.json into common.out. Everything is read
/// and computed before the first file is written; on a write failure the
/// files already written are removed.
int cmd_pipeline(const PipelineArgs& args, const CommonArgs& common, std::ostream& out, std::ostream& err);

/// Runs `fn`, turning exceptions into an exit status plus a message on `err`.
int guarded(std::ostream& err, const std::function<int()>& fn);

}  // namespace testbed::cli
