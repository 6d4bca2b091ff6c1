#include "testbed/traffic/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <memory>
#include <optional>

#include "testbed/common/csv.hpp"

namespace testbed::traffic {

std::string_view to_string(JobType type) {
  switch (type) {
    case JobType::WEB: return "WEB";
    case JobType::SMB: return "SMB";
    case JobType::SSH: return "SSH";
    case JobType::SFTP: return "SFTP";
  }
  return "?";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  for (;;) {
    auto comma = text.find(',');
    auto item = trim(text.substr(0, comma));
    if (!item.empty())
      for (auto& t : expand_token(item)) out.push_back(std::move(t));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

const std::vector<std::string>& server_packages(JobType type) {
  static const std::vector<std::string> web{"apache2", "nginx", "httpd"};
  static const std::vector<std::string> ssh{"openssh-server"};
  static const std::vector<std::string> smb{"samba"};
  switch (type) {
    case JobType::WEB: return web;
    case JobType::SMB: return smb;
    case JobType::SSH:
    case JobType::SFTP: return ssh;
  }
  return web;
}

}  // namespace

std::vector<std::string> expand_token(std::string_view token) {
  // <stem><a>-<b> where a and b are decimal and a <= b
  auto dash = token.rfind('-');
  if (dash == std::string_view::npos) return {std::string(token)};
  auto left = token.substr(0, dash);
  auto hi = to_int(token.substr(dash + 1));
  std::size_t digits = left.size();
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(left[digits - 1]))) --digits;
  auto lo = to_int(left.substr(digits));
  if (!hi || !lo || digits == 0 || *lo > *hi || *hi - *lo > 1000) return {std::string(token)};
  std::vector<std::string> out;
  for (int i = *lo; i <= *hi; ++i) out.push_back(std::string(left.substr(0, digits)) + std::to_string(i));
  return out;
}

HostSelector parse_selector(std::string_view text) {
  text = trim(text);
  auto braced = [](std::string_view s) -> std::optional<std::string_view> {
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') return std::nullopt;
    return s.substr(1, s.size() - 2);
  };
  if (text == "All") return {HostSelector::Kind::All, {}};
  if (starts_with(text, "All-")) {
    auto inner = braced(trim(text.substr(4)));
    if (!inner) throw SyntaxError("bad host selector '" + std::string(text) + "'");
    return {HostSelector::Kind::AllBut, split_list(*inner)};
  }
  if (auto inner = braced(text)) {
    auto names = split_list(*inner);
    if (names.empty()) throw SyntaxError("empty host list");
    return {HostSelector::Kind::Explicit, std::move(names)};
  }
  if (text.empty() || text.find_first_of("{},* ") != std::string_view::npos)
    throw SyntaxError("bad host selector '" + std::string(text) + "'");
  return {HostSelector::Kind::Explicit, expand_token(text)};
}

std::vector<TrafficProfileEntry> load_profiles(std::string_view document) {
  std::vector<TrafficProfileEntry> out;
  std::unique_ptr<csv::Table> table;
  try {
    table = std::make_unique<csv::Table>(document, std::vector<std::string>{"type", "start", "end", "freq", "hosts",
                                                                            "servers"});
  } catch (const csv::CsvError& e) {
    throw ProfileSyntaxError(e.line(), e.what());
  }

  for (const auto& row : table->rows()) {
    auto field = [&](const char* c) { return trim(table->field(row, c)); };
    auto fail = [&](const std::string& what) { return ProfileSyntaxError(row.line, what); };

    TrafficProfileEntry e;
    e.id = std::string(field("type"));
    if (starts_with(e.id, "SFTP"))
      e.type = JobType::SFTP;
    else if (starts_with(e.id, "SSH"))
      e.type = JobType::SSH;
    else if (starts_with(e.id, "SMB"))
      e.type = JobType::SMB;
    else if (starts_with(e.id, "WEB"))
      e.type = JobType::WEB;
    else
      throw fail("unknown job type '" + e.id + "'");

    auto start = TimeOfDay::try_parse(field("start"));
    auto end = TimeOfDay::try_parse(field("end"));
    if (!start) throw fail("bad start time '" + std::string(field("start")) + "'");
    if (!end) throw fail("bad end time '" + std::string(field("end")) + "'");
    if (!(*start < *end)) throw fail("start must precede end");
    e.start = *start;
    e.end = *end;

    auto freq = to_int(field("freq"));
    if (!freq || *freq <= 0) throw fail("freq must be a positive number of minutes");
    e.freq_minutes = *freq;

    try {
      e.hosts = parse_selector(field("hosts"));
    } catch (const SyntaxError& err) {
      throw fail(err.what());
    }

    auto servers = field("servers");
    if (servers == "*") {
      e.any_server = true;
    } else {
      e.servers = split_list(servers);
      if (e.servers.empty()) throw fail("no servers listed");
      if (std::find(e.servers.begin(), e.servers.end(), "*") != e.servers.end())
        throw fail("'*' cannot be combined with named servers");
    }
    out.push_back(std::move(e));
  }
  return out;
}

bool selects(const HostSelector& selector, const model::HostSpec& host) {
  const bool listed = std::find(selector.names.begin(), selector.names.end(), host.name) != selector.names.end();
  switch (selector.kind) {
    case HostSelector::Kind::All: return host.agent_profile.has_value();
    case HostSelector::Kind::AllBut: return host.agent_profile.has_value() && !listed;
    case HostSelector::Kind::Explicit: return listed;
  }
  return false;
}

std::vector<const model::HostSpec*> resolve_hosts(const TrafficProfileEntry& entry, const model::TestbedConfig& cfg) {
  for (const auto& name : entry.hosts.names)
    if (!cfg.find_host(name)) throw UnresolvedSelector(entry.id + ": unknown host '" + name + "'");
  std::vector<const model::HostSpec*> out;
  for (const auto& h : cfg.hosts)
    if (selects(entry.hosts, h)) out.push_back(&h);
  return out;
}

std::vector<std::string> resolve_servers(const TrafficProfileEntry& entry, const model::TestbedConfig& cfg,
                                         std::string_view client) {
  if (!entry.any_server) {
    for (const auto& name : entry.servers)
      if (!cfg.find_host(name)) throw UnresolvedSelector(entry.id + ": unknown server '" + name + "'");
    return entry.servers;
  }
  const auto& packages = server_packages(entry.type);
  std::vector<std::string> out;
  for (const auto& h : cfg.hosts) {
    if (h.name == client) continue;
    if (std::any_of(h.packages.begin(), h.packages.end(), [&](const model::PackageSpec& p) {
          return std::find(packages.begin(), packages.end(), p.name) != packages.end();
        }))
      out.push_back(h.name);
  }
  return out;
}

}  // namespace testbed::traffic
