#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "testbed/traffic/profile.hpp"

namespace testbed::traffic {

inline constexpr int kClickDepthLimit = 7;
inline constexpr std::uint64_t kBaseFileSize = 8192;

struct WebParams {
  int n_requests = 1;
  int click_depth_limit = kClickDepthLimit;
  std::vector<double> waits;       // seconds before requests 2..n
  std::vector<std::string> pages;  // one path per request
  std::string user_agent;
  bool https = false;

  friend bool operator==(const WebParams&, const WebParams&) = default;
};

struct SshParams {
  int n_commands = 1;
  double session_seconds = 0;  // whole milliseconds
  std::vector<std::string> commands;

  friend bool operator==(const SshParams&, const SshParams&) = default;
};

/// SMB and SFTP transfers.
struct FileParams {
  int n_files = 1;
  std::vector<std::uint64_t> sizes;  // each a multiple of base_size
  std::uint64_t base_size = kBaseFileSize;

  friend bool operator==(const FileParams&, const FileParams&) = default;
};

using JobParams = std::variant<WebParams, SshParams, FileParams>;

/// Commands an SSH job picks from.
std::span<const std::string_view> default_ssh_commands();

/// User-Agent string for a host's operating system name.
std::string_view user_agent_for(std::string_view os);

/// `os` is the client's template OS, used for the WEB user agent.
JobParams draw_job_params(JobType type, std::uint64_t seed, std::string_view os = "Linux");

struct ScheduledJob {
  std::string job_id;  // "<entry>/<host>/<n>"
  std::string entry;
  JobType type = JobType::WEB;
  std::string host;
  std::string server;
  Timestamp start_ts{};
  Timestamp window_end{};  // the entry's end on the scheduled day
  JobParams params;

  friend bool operator==(const ScheduledJob&, const ScheduledJob&) = default;
};

/// One day of jobs. For every entry and selected host, starts are spaced by
/// gaps drawn uniformly from [0.5, 1.5] x freq minutes, the first at the
/// entry's start, none past its end. Each (entry, host) stream has its own
/// derived seed. Times of day are taken in UTC. Sorted by start time.
std::vector<ScheduledJob> schedule_day(std::span<const TrafficProfileEntry> entries, const model::TestbedConfig& cfg,
                                       std::chrono::year_month_day date, std::uint64_t seed);

nlohmann::ordered_json to_json(const JobParams& params);
nlohmann::ordered_json to_json(const ScheduledJob& job);

/// Agent configuration for one host: the entries selecting it and their
/// server lists ("*" kept literally). Stable key order.
std::string render_agent_config(const model::HostSpec& host, std::span<const TrafficProfileEntry> entries);

}  // namespace testbed::traffic
