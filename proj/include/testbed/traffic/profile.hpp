#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/error.hpp"
#include "testbed/common/time.hpp"
#include "testbed/model/config.hpp"

namespace testbed::traffic {

enum class JobType { WEB, SMB, SSH, SFTP };

std::string_view to_string(JobType type);

struct HostSelector {
  enum class Kind { All, AllBut, Explicit };
  Kind kind = Kind::All;
  std::vector<std::string> names;  // excluded (AllBut) or listed (Explicit)

  friend bool operator==(const HostSelector&, const HostSelector&) = default;
};

struct TrafficProfileEntry {
  std::string id;  // the type column as written, e.g. "SMB1"
  JobType type = JobType::WEB;
  TimeOfDay start;
  TimeOfDay end;
  int freq_minutes = 1;
  HostSelector hosts;
  bool any_server = false;  // "*"
  std::vector<std::string> servers;

  friend bool operator==(const TrafficProfileEntry&, const TrafficProfileEntry&) = default;
};

class ProfileSyntaxError : public SyntaxError {
 public:
  ProfileSyntaxError(std::size_t line, const std::string& what)
      : SyntaxError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Expands "ced1-3" to ced1, ced2, ced3; other tokens pass through.
std::vector<std::string> expand_token(std::string_view token);

/// `All`, `All-{a,b}`, `{a,b}` or a single bare name.
HostSelector parse_selector(std::string_view text);

/// CSV with header `type,start,end,freq,hosts,servers`.
std::vector<TrafficProfileEntry> load_profiles(std::string_view document);

class UnresolvedSelector : public Error {
 public:
  explicit UnresolvedSelector(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// `All` means every host that runs a traffic agent (has an agent profile).
/// Names that are not hosts of `cfg` throw UnresolvedSelector.
std::vector<const model::HostSpec*> resolve_hosts(const TrafficProfileEntry& entry, const model::TestbedConfig& cfg);

/// Candidate servers for a job from `client`. A "*" entry stands for every
/// other host carrying a server package for the job type.
std::vector<std::string> resolve_servers(const TrafficProfileEntry& entry, const model::TestbedConfig& cfg,
                                         std::string_view client);

/// True when `host` is picked by the entry's selector, judged from the host alone.
bool selects(const HostSelector& selector, const model::HostSpec& host);

}  // namespace testbed::traffic
