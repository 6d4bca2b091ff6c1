#include <iostream>

#include "CLI11.hpp"
#include "testbed/cli/commands.hpp"

using namespace testbed::cli;

int main(int argc, char** argv) {
  CLI::App app{"Testbed builder: scan merge, deployment planning, traffic simulation and flow labeling"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonArgs common;
  std::string format = "json";
  app.add_option("--seed", common.seed, "Master seed")->capture_default_str();
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.fallthrough();

  std::function<int()> run;

  MergeScansArgs merge;
  auto* merge_cmd = app.add_subcommand("merge-scans", "Consolidate Nmap and OpenVAS OS detections");
  merge_cmd->add_option("--nmap", merge.nmap, "Nmap XML report")->expected(1, -1);
  merge_cmd->add_option("--openvas", merge.openvas, "OpenVAS CSV report")->expected(1, -1);
  merge_cmd->callback([&] { run = [&] { return cmd_merge_scans(merge, common, std::cout, std::cerr); }; });

  // validate, plan and sniffers share the config arguments.
  ConfigArgs config;
  auto config_command = [&](const char* name, const char* help, auto fn, bool with_nodes) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config.config, "Testbed config JSON")->required();
    if (with_nodes) sub->add_option("--nodes", config.nodes, "Physical nodes for round-robin placement");
    sub->callback([&, fn] { run = [&, fn] { return fn(config, common, std::cout, std::cerr); }; });
  };
  config_command("validate", "Check a testbed config", cmd_validate, false);
  config_command("plan", "Emit the deployment plan and init scripts", cmd_plan, true);
  config_command("sniffers", "Emit the mirror-port sniffer layout", cmd_sniffers, true);

  RouteCheckArgs route;
  auto* route_cmd = app.add_subcommand("route-check", "Trace a path between two addresses");
  route_cmd->add_option("config", route.config, "Testbed config JSON")->required();
  route_cmd->add_option("src", route.src, "Source IPv4 address")->required();
  route_cmd->add_option("dst", route.dst, "Destination IPv4 address")->required();
  route_cmd->add_option("--proto", route.proto)->check(CLI::IsMember({"tcp", "udp", "any"}))->capture_default_str();
  route_cmd->add_option("--port", route.port, "Destination port");
  route_cmd->callback([&] { run = [&] { return cmd_route_check(route, common, std::cout, std::cerr); }; });

  ScheduleArgs schedule;
  for (auto [name, help, fn] : {std::tuple{"schedule", "Expand traffic profiles into jobs", cmd_schedule},
                                std::tuple{"simulate", "Render scheduled jobs as synthetic flows", cmd_simulate}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", schedule.config, "Testbed config JSON")->required();
    sub->add_option("profiles", schedule.profiles, "Traffic profile CSV")->required();
    sub->add_option("--date", schedule.date, "Day to schedule (YYYY-MM-DD)")->capture_default_str();
    sub->callback([&, fn = fn] { run = [&, fn] { return fn(schedule, common, std::cout, std::cerr); }; });
  }

  FlowArgs flow;
  for (auto [name, help, fn, needs_windows] :
       {std::tuple{"flows-extract", "Assemble flows from a capture and export features", cmd_flows_extract, false},
        std::tuple{"flows-label", "Assemble flows and label them from attack windows", cmd_flows_label, true},
        std::tuple{"stats", "Per-window packet statistics", cmd_stats, true}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("capture", flow.capture, "pcap or packet CSV")->required();
    sub->add_option("--capture-format", flow.capture_format)->check(CLI::IsMember({"pcap", "csv"}));
    auto* w = sub->add_option("--windows", flow.windows, "Attack window CSV");
    if (needs_windows) w->required();
    sub->add_option("--config", flow.config, "Config used to resolve VLAN names in windows");
    sub->add_option("--idle-timeout", flow.idle_timeout_s, "Seconds")->capture_default_str();
    sub->callback([&, fn = fn] { run = [&, fn] { return fn(flow, common, std::cout, std::cerr); }; });
  }

  PipelineArgs pipeline;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Plan, schedule, simulate and label in one run");
  pipe_cmd->add_option("config", pipeline.config, "Testbed config JSON")->required();
  pipe_cmd->add_option("profiles", pipeline.profiles, "Traffic profile CSV")->required();
  pipe_cmd->add_option("windows", pipeline.windows, "Attack window CSV")->required();
  pipe_cmd->add_option("--date", pipeline.date)->capture_default_str();
  pipe_cmd->add_option("--nodes", pipeline.nodes);
  pipe_cmd->callback([&] { run = [&] { return cmd_pipeline(pipeline, common, std::cout, std::cerr); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kSyntaxError;
  }
  common.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  return guarded(std::cerr, run);
}
