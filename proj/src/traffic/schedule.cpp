#include "testbed/traffic/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "testbed/common/random.hpp"

namespace testbed::traffic {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 12> kSshCommands{
    "ls", "cd", "cat /var/log/messages", "ls -la", "pwd", "uptime", "df -h", "ps aux", "whoami", "uname -a",
    "free -m", "tail -n 50 /var/log/syslog",
};

WebParams draw_web(Rng& rng, std::uint64_t seed, std::string_view os) {
  WebParams p;
  p.n_requests = static_cast<int>(rng.uniform_int(1, 20));
  p.https = rng.uniform_int(0, 1) == 1;
  p.user_agent = std::string(user_agent_for(os));

  // Random click tree: every page has 1-5 links, fixed per (job, path).
  const auto graph_seed = derive_seed(seed, "click-graph");
  std::string page = "/";
  int depth = 0;
  for (int i = 0; i < p.n_requests; ++i) {
    if (i > 0) {
      p.waits.push_back(rng.uniform_real(5.0, 10.0));
      if (depth == p.click_depth_limit) {
        page = "/";
        depth = 0;
      } else {
        const auto links = static_cast<std::int64_t>(1 + derive_seed(graph_seed, page) % 5);
        page += (depth ? "/" : "") + std::string("p") + std::to_string(rng.uniform_int(0, links - 1));
        ++depth;
      }
    }
    p.pages.push_back(page);
  }
  return p;
}

SshParams draw_ssh(Rng& rng) {
  SshParams p;
  p.n_commands = static_cast<int>(rng.uniform_int(1, 20));
  p.session_seconds = static_cast<double>(rng.uniform_int(30000, 600000)) / 1000.0;
  for (int i = 0; i < p.n_commands; ++i)
    p.commands.emplace_back(rng.pick(std::span<const std::string_view>(kSshCommands)));
  return p;
}

FileParams draw_files(Rng& rng) {
  FileParams p;
  p.n_files = static_cast<int>(rng.uniform_int(1, 10));
  for (int i = 0; i < p.n_files; ++i) p.sizes.push_back(static_cast<std::uint64_t>(rng.uniform_int(1, 16)) * p.base_size);
  return p;
}

}  // namespace

std::span<const std::string_view> default_ssh_commands() { return kSshCommands; }

std::string_view user_agent_for(std::string_view os) {
  std::string lowered(os);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lowered.find("windows") != std::string::npos)
    return "Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:61.0) Gecko/20100101 Firefox/61.0";
  if (lowered.find("mac") != std::string::npos)
    return "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_13_6) AppleWebKit/605.1.15 (KHTML, like Gecko) "
           "Version/11.1.2 Safari/605.1.15";
  return "Mozilla/5.0 (X11; Linux x86_64; rv:61.0) Gecko/20100101 Firefox/61.0";
}

JobParams draw_job_params(JobType type, std::uint64_t seed, std::string_view os) {
  Rng rng(seed);
  switch (type) {
    case JobType::WEB: return draw_web(rng, seed, os);
    case JobType::SSH: return draw_ssh(rng);
    case JobType::SMB:
    case JobType::SFTP: return draw_files(rng);
  }
  return draw_web(rng, seed, os);
}

std::vector<ScheduledJob> schedule_day(std::span<const TrafficProfileEntry> entries, const model::TestbedConfig& cfg,
                                       std::chrono::year_month_day date, std::uint64_t seed) {
  using namespace std::chrono;
  const sys_days midnight{date};
  auto at = [&](double minutes) { return time_point_cast<Micros>(midnight) + Micros{std::llround(minutes * 60e6)}; };

  std::vector<ScheduledJob> jobs;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& entry = entries[e];
    const double start = entry.start.minutes();
    const double end = entry.end.minutes();
    const double freq = entry.freq_minutes;

    for (const auto* host : resolve_hosts(entry, cfg)) {
      const auto servers = resolve_servers(entry, cfg, host->name);
      if (servers.empty()) throw UnresolvedSelector(entry.id + ": no server available for " + host->name);
      const auto* tmpl = cfg.find_template(host->template_id);
      const std::string os = tmpl ? tmpl->os : "Linux";

      Rng rng(derive_seed(derive_seed(seed, e), entry.id + "/" + host->name));
      int n = 0;
      for (double t = start; t <= end; t += rng.uniform_real(0.5 * freq, 1.5 * freq)) {
        ScheduledJob job;
        job.job_id = entry.id + "/" + host->name + "/" + std::to_string(n++);
        job.entry = entry.id;
        job.type = entry.type;
        job.host = host->name;
        job.server = rng.pick(std::span<const std::string>(servers));
        job.start_ts = at(t);
        job.window_end = at(end);
        job.params = draw_job_params(entry.type, rng.next(), os);
        jobs.push_back(std::move(job));
      }
    }
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const ScheduledJob& a, const ScheduledJob& b) {
    return std::tie(a.start_ts, a.host, a.job_id) < std::tie(b.start_ts, b.host, b.job_id);
  });
  return jobs;
}

ordered_json to_json(const JobParams& params) {
  return std::visit(
      [](const auto& p) -> ordered_json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, WebParams>) {
          return {{"n_requests", p.n_requests}, {"click_depth_limit", p.click_depth_limit},
                  {"waits", p.waits},           {"pages", p.pages},
                  {"user_agent", p.user_agent}, {"scheme", p.https ? "https" : "http"}};
        } else if constexpr (std::is_same_v<T, SshParams>) {
          return {{"n_commands", p.n_commands}, {"session_seconds", p.session_seconds}, {"commands", p.commands}};
        } else {
          return {{"n_files", p.n_files}, {"sizes", p.sizes}, {"base_size", p.base_size}};
        }
      },
      params);
}

ordered_json to_json(const ScheduledJob& job) {
  return {{"job_id", job.job_id},
          {"entry", job.entry},
          {"type", to_string(job.type)},
          {"host", job.host},
          {"server", job.server},
          {"start", format_iso8601(job.start_ts)},
          {"params", to_json(job.params)}};
}

std::string render_agent_config(const model::HostSpec& host, std::span<const TrafficProfileEntry> entries) {
  ordered_json j{{"host", host.name},
                 {"agent_profile", host.agent_profile ? ordered_json(*host.agent_profile) : ordered_json(nullptr)}};
  j["jobs"] = ordered_json::array();
  for (const auto& e : entries) {
    if (!selects(e.hosts, host)) continue;
    j["jobs"].push_back({{"entry", e.id},
                         {"type", to_string(e.type)},
                         {"start", e.start.to_string()},
                         {"end", e.end.to_string()},
                         {"freq_minutes", e.freq_minutes},
                         {"servers", e.any_server ? std::vector<std::string>{"*"} : e.servers}});
  }
  return j.dump(2) + "\n";
}

}  // namespace testbed::traffic
