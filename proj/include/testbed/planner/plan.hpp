#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "testbed/model/config.hpp"

namespace testbed::planner {

class NoNodes : public Error {
 public:
  NoNodes() : Error(ErrorKind::Domain, "at least one node is required") {}
};

/// Fills unset HostSpec::node round-robin over `nodes` in host declaration
/// order. Hosts with a preset node keep it and do not advance the cursor.
model::TestbedConfig assign_nodes(model::TestbedConfig cfg, std::span<const model::NodeId> nodes);

enum class StepKind { CreateBridge, CreateVlan, CreateRouter, CreateFirewall, InstantiateHost, AttachMirror };

std::string_view to_string(StepKind kind);

struct Step {
  StepKind kind = StepKind::CreateBridge;
  std::string target;
  std::vector<std::size_t> depends_on;
  nlohmann::ordered_json payload;

  friend bool operator==(const Step&, const Step&) = default;
};

struct DeploymentPlan {
  std::vector<Step> steps;
};

/// Tiered plan: bridges, vlans, routers, firewalls, hosts, mirrors; each tier
/// in declaration order. Throws model::ValidationFailed when the config has
/// Error-severity violations.
DeploymentPlan emit_deployment_plan(const model::TestbedConfig& cfg);

nlohmann::ordered_json to_json(const DeploymentPlan& plan);

/// Replays the plan against an initially empty symbol table. Returns one
/// message per step that references an entity not yet created or depends on
/// a later step; empty means the plan is executable in order.
std::vector<std::string> dry_run(const DeploymentPlan& plan);

}  // namespace testbed::planner
