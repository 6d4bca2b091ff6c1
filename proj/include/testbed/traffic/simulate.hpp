#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "testbed/flows/flow.hpp"
#include "testbed/traffic/schedule.hpp"

namespace testbed::traffic {

struct SyntheticFlow {
  flows::FlowRecord flow;
  std::string job_id;
  std::string host;
  std::string server;
  JobType job_type = JobType::WEB;
};

struct SyntheticFlowLog {
  std::vector<SyntheticFlow> flows;
};

class UnresolvedHost : public Error {
 public:
  explicit UnresolvedHost(const std::string& name)
      : Error(ErrorKind::Domain, "host '" + name + "' has no address in the config") {}
};

/// Flows a job would produce past its window end are still accepted up to this.
inline constexpr std::chrono::minutes kSimulationGrace{30};

/// Renders every job as synthetic packet exchanges folded into flow records.
/// WEB: one TCP flow per request to 80 or 443. SSH: one flow to 22 lasting
/// exactly session_seconds. SMB: one flow to 445 carrying all file bytes.
/// SFTP: one flow to 22 carrying all file bytes. Flows are listed in job
/// order; packet timing is drawn from a per-job seed.
SyntheticFlowLog simulate_jobs(std::span<const ScheduledJob> jobs, const model::TestbedConfig& cfg,
                               std::uint64_t seed);

/// `job_id,host,server,job_type` followed by the flow CSV columns.
std::string export_synthetic_csv(const SyntheticFlowLog& log);

}  // namespace testbed::traffic
