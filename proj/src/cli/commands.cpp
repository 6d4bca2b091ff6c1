#include "testbed/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "testbed/common/csv.hpp"
#include "testbed/common/random.hpp"
#include "testbed/common/time.hpp"
#include "testbed/flows/capture.hpp"
#include "testbed/flows/features.hpp"
#include "testbed/flows/windows.hpp"
#include "testbed/model/config.hpp"
#include "testbed/model/validate.hpp"
#include "testbed/netcheck/netcheck.hpp"
#include "testbed/planner/init_script.hpp"
#include "testbed/planner/plan.hpp"
#include "testbed/planner/sniffers.hpp"
#include "testbed/scanmerge/consolidate.hpp"
#include "testbed/scanmerge/reports.hpp"
#include "testbed/scanmerge/serialize.hpp"
#include "testbed/traffic/schedule.hpp"
#include "testbed/traffic/simulate.hpp"

namespace testbed::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Io: return kIoError;
      case ErrorKind::Syntax: return kSyntaxError;
      case ErrorKind::Validation:
      case ErrorKind::Domain: return kValidationError;
      case ErrorKind::Internal: return kInternalError;
    }
  }
  return kInternalError;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

int guarded(std::ostream& err, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const model::ValidationFailed& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& v : e.violations())
      err << "  " << (v.severity == model::Severity::Error ? "error" : "warning") << " " << v.path << ": "
          << v.message << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Wall clock, or SOURCE_DATE_EPOCH when set so manifests can be reproduced.
Timestamp manifest_clock() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long secs = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0' && end != epoch) return from_epoch_us(secs * 1000000);
  }
  return std::chrono::time_point_cast<Micros>(std::chrono::system_clock::now());
}

/// Reads inputs and remembers their digests for the manifest.
class Inputs {
 public:
  std::string read(const fs::path& path) {
    auto bytes = read_file(path);
    digests_.push_back({path.generic_string(), fnv1a64(bytes)});
    return bytes;
  }

  ordered_json to_json() const {
    auto out = ordered_json::array();
    for (const auto& [path, hash] : digests_) out.push_back({{"path", path}, {"fnv1a64", hex64(hash)}});
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::uint64_t>> digests_;
};

/// Artifacts are staged in memory and written together with a manifest.
class Outputs {
 public:
  Outputs(std::string command, const CommonArgs& common) : command_(std::move(command)), common_(common) {
    if (common.out.empty()) throw IoError(command_ + ": --out <dir> is required");
  }

  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  void commit(const Inputs& inputs) {
    ordered_json manifest{{"command", command_},
                          {"tool_version", kToolVersion},
                          {"seed", common_.seed},
                          {"inputs", inputs.to_json()},
                          {"outputs", ordered_json::array()},
                          {"feature_catalog", flows::kFeatureCatalogVersion},
                          {"started", format_iso8601(started_)}};
    for (const auto& f : files_) manifest["outputs"].push_back(f.first);
    manifest["finished"] = format_iso8601(manifest_clock());
    files_.emplace_back("manifest.json", manifest.dump(2) + "\n");

    std::vector<fs::path> written;
    try {
      std::error_code ec;
      fs::create_directories(common_.out, ec);
      if (ec) throw IoError("cannot create " + common_.out.string() + ": " + ec.message());
      for (const auto& [name, content] : files_) {
        const auto path = common_.out / name;
        if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + path.string());
        written.push_back(path);
        f << content;
        f.close();
        if (!f) throw IoError("error writing " + path.string());
      }
    } catch (...) {
      std::error_code ignore;
      for (const auto& p : written) fs::remove(p, ignore);
      throw;
    }
  }

 private:
  std::string command_;
  CommonArgs common_;
  Timestamp started_ = manifest_clock();
  std::vector<std::pair<std::string, std::string>> files_;
};

// Syntax errors from an input carry the file name.
template <typename Fn>
auto parse_input(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const SyntaxError& e) {
    throw SyntaxError(path.string() + ": " + e.what());
  }
}

model::TestbedConfig load_config_file(Inputs& inputs, const fs::path& path) {
  const auto text = inputs.read(path);
  return parse_input(path, [&] { return model::load_config(text); });
}

std::chrono::year_month_day parse_day(const std::string& text) {
  auto d = parse_date(text);
  if (!d) throw SyntaxError("bad date '" + text + "', expected YYYY-MM-DD");
  return *d;
}

std::string jsonl(const std::vector<ordered_json>& lines) {
  std::string out;
  for (const auto& l : lines) out += l.dump() + "\n";
  return out;
}

std::vector<flows::AttackWindow> load_windows_file(Inputs& inputs, const fs::path& path,
                                                   const model::TestbedConfig* cfg) {
  const auto text = inputs.read(path);
  return parse_input(path, [&] { return flows::load_attack_windows(text, cfg); });
}

std::vector<flows::PacketMeta> load_capture(Inputs& inputs, const FlowArgs& args) {
  auto format = flows::CaptureFormat::Pcap;
  const auto choice = args.capture_format.value_or(args.capture.extension() == ".csv" ? "csv" : "pcap");
  if (choice == "csv")
    format = flows::CaptureFormat::PacketCsv;
  else if (choice != "pcap")
    throw SyntaxError("unknown capture format '" + choice + "'");
  const auto bytes = inputs.read(args.capture);
  return parse_input(args.capture, [&] { return flows::read_capture(bytes, format).packets; });
}

}  // namespace

int cmd_merge_scans(const MergeScansArgs& args, const CommonArgs& common, std::ostream&, std::ostream& err) {
  if (args.nmap.empty() && args.openvas.empty()) throw IoError("merge-scans: no input reports given");
  Outputs outputs("merge-scans", common);
  Inputs inputs;

  std::vector<scanmerge::HostScanEntry> nmap, openvas;
  for (const auto& p : args.nmap) {
    const auto text = inputs.read(p);
    auto hosts = parse_input(p, [&] { return scanmerge::parse_nmap_report(text); });
    nmap.insert(nmap.end(), hosts.begin(), hosts.end());
  }
  for (const auto& p : args.openvas) {
    const auto text = inputs.read(p);
    auto hosts = parse_input(p, [&] { return scanmerge::parse_openvas_report(text); });
    openvas.insert(openvas.end(), hosts.begin(), hosts.end());
  }

  const auto merged = scanmerge::merge_entries(nmap, openvas);
  const auto verdicts = scanmerge::consolidate_all(merged);
  std::vector<scanmerge::OsVerdict> plain;
  for (const auto& v : verdicts) plain.push_back(v.verdict);
  const auto coverage = scanmerge::coverage_stats(plain);

  outputs.add("verdicts.json", scanmerge::to_json(verdicts).dump(2) + "\n");
  outputs.add("coverage.json", scanmerge::to_json(coverage).dump(2) + "\n");
  outputs.commit(inputs);
  err << verdicts.size() << " hosts consolidated, " << coverage.with_generation << "/" << coverage.total
      << " identified hosts carry a generation\n";
  return kOk;
}

int cmd_validate(const ConfigArgs& args, const CommonArgs& common, std::ostream& out, std::ostream&) {
  Inputs inputs;
  const auto cfg = load_config_file(inputs, args.config);
  const auto violations = model::validate_config(cfg);

  std::string report;
  if (common.format == OutputFormat::Csv) {
    report = "severity,path,message\n";
    for (const auto& v : violations)
      report += csv::join({v.severity == model::Severity::Error ? "error" : "warning", v.path, v.message}) + "\n";
  } else {
    auto j = ordered_json::array();
    for (const auto& v : violations)
      j.push_back({{"severity", v.severity == model::Severity::Error ? "error" : "warning"},
                   {"path", v.path},
                   {"message", v.message}});
    report = j.dump(2) + "\n";
  }

  if (common.out.empty()) {
    out << report;
  } else {
    Outputs outputs("validate", common);
    outputs.add(common.format == OutputFormat::Csv ? "violations.csv" : "violations.json", report);
    outputs.commit(inputs);
  }
  return model::has_errors(violations) ? kValidationError : kOk;
}

int cmd_plan(const ConfigArgs& args, const CommonArgs& common, std::ostream&, std::ostream&) {
  Outputs outputs("plan", common);
  Inputs inputs;
  const auto cfg = planner::assign_nodes(load_config_file(inputs, args.config), args.nodes);
  const auto plan = planner::emit_deployment_plan(cfg);

  outputs.add("plan.json", planner::to_json(plan).dump(2) + "\n");
  for (const auto& host : cfg.hosts) {
    const auto* tmpl = cfg.find_template(host.template_id);
    const bool windows = tmpl && planner::script_flavor(*tmpl) == planner::ScriptFlavor::Windows;
    outputs.add("scripts/" + host.name + (windows ? ".bat" : ".sh"), planner::emit_init_script(host, cfg));
  }
  outputs.commit(inputs);
  return kOk;
}

int cmd_sniffers(const ConfigArgs& args, const CommonArgs& common, std::ostream&, std::ostream&) {
  Outputs outputs("sniffers", common);
  Inputs inputs;
  const auto cfg = planner::assign_nodes(load_config_file(inputs, args.config), args.nodes);
  auto violations = model::validate_config(cfg);
  if (model::has_errors(violations)) throw model::ValidationFailed(std::move(violations));
  outputs.add("sniffers.json", planner::to_json(planner::plan_sniffers(cfg)).dump(2) + "\n");
  outputs.commit(inputs);
  return kOk;
}

int cmd_route_check(const RouteCheckArgs& args, const CommonArgs& common, std::ostream& out, std::ostream&) {
  Inputs inputs;
  const auto cfg = load_config_file(inputs, args.config);
  const auto src = Ipv4Addr::parse(args.src);
  const auto dst = Ipv4Addr::parse(args.dst);
  model::RuleProto proto;
  if (args.proto == "tcp")
    proto = model::RuleProto::TCP;
  else if (args.proto == "udp")
    proto = model::RuleProto::UDP;
  else if (args.proto == "any")
    proto = model::RuleProto::Any;
  else
    throw SyntaxError("unknown protocol '" + args.proto + "'");
  std::optional<std::uint16_t> port;
  if (args.port) {
    if (*args.port < 0 || *args.port > 65535) throw SyntaxError("port out of range");
    port = static_cast<std::uint16_t>(*args.port);
  }

  const auto line = netcheck::to_json(src, dst, netcheck::trace_path(cfg, src, dst, proto, port)).dump() + "\n";
  if (common.out.empty()) {
    out << line;
  } else {
    Outputs outputs("route-check", common);
    outputs.add("paths.jsonl", line);
    outputs.commit(inputs);
  }
  return kOk;
}

int cmd_schedule(const ScheduleArgs& args, const CommonArgs& common, std::ostream&, std::ostream&) {
  Outputs outputs("schedule", common);
  Inputs inputs;
  const auto cfg = load_config_file(inputs, args.config);
  const auto profile_text = inputs.read(args.profiles);
  const auto entries = parse_input(args.profiles, [&] { return traffic::load_profiles(profile_text); });
  const auto jobs = traffic::schedule_day(entries, cfg, parse_day(args.date), common.seed);

  std::vector<ordered_json> lines;
  for (const auto& j : jobs) lines.push_back(traffic::to_json(j));
  outputs.add("schedule.jsonl", jsonl(lines));
  for (const auto& h : cfg.hosts)
    if (h.agent_profile) outputs.add("agents/" + h.name + ".json", traffic::render_agent_config(h, entries));
  outputs.commit(inputs);
  return kOk;
}

int cmd_simulate(const ScheduleArgs& args, const CommonArgs& common, std::ostream&, std::ostream&) {
  Outputs outputs("simulate", common);
  Inputs inputs;
  const auto cfg = load_config_file(inputs, args.config);
  const auto profile_text = inputs.read(args.profiles);
  const auto entries = parse_input(args.profiles, [&] { return traffic::load_profiles(profile_text); });
  const auto jobs = traffic::schedule_day(entries, cfg, parse_day(args.date), common.seed);
  outputs.add("synthetic_flows.csv", traffic::export_synthetic_csv(traffic::simulate_jobs(jobs, cfg, common.seed)));
  outputs.commit(inputs);
  return kOk;
}

int cmd_flows_extract(const FlowArgs& args, const CommonArgs& common, std::ostream&, std::ostream& err) {
  Outputs outputs("flows-extract", common);
  Inputs inputs;
  const auto packets = load_capture(inputs, args);
  const auto flows = flows::assemble_flows(packets, args.idle_timeout_s);
  outputs.add("flows.csv", flows::export_csv(flows));
  outputs.commit(inputs);
  err << packets.size() << " packets, " << flows.size() << " flows\n";
  return kOk;
}

int cmd_flows_label(const FlowArgs& args, const CommonArgs& common, std::ostream&, std::ostream&) {
  if (!args.windows) throw IoError("flows-label: --windows is required");
  Outputs outputs("flows-label", common);
  Inputs inputs;
  std::optional<model::TestbedConfig> cfg;
  if (args.config) cfg = load_config_file(inputs, *args.config);
  const auto windows = load_windows_file(inputs, *args.windows, cfg ? &*cfg : nullptr);
  const auto packets = load_capture(inputs, args);
  const auto labeled = flows::label_flows(flows::assemble_flows(packets, args.idle_timeout_s), windows);
  outputs.add("labeled_flows.csv", flows::export_csv(labeled));
  outputs.commit(inputs);
  return kOk;
}

int cmd_stats(const FlowArgs& args, const CommonArgs& common, std::ostream&, std::ostream&) {
  if (!args.windows) throw IoError("stats: --windows is required");
  Outputs outputs("stats", common);
  Inputs inputs;
  std::optional<model::TestbedConfig> cfg;
  if (args.config) cfg = load_config_file(inputs, *args.config);
  const auto windows = load_windows_file(inputs, *args.windows, cfg ? &*cfg : nullptr);
  const auto packets = load_capture(inputs, args);

  auto rows = ordered_json::array();
  std::string csv_out = "name,attacker,victim,duration_s,n_pkts,avg_pps,avg_size_b\n";
  for (const auto& w : windows) {
    ordered_json row;
    try {
      row = flows::to_json(w, flows::window_stats(packets, w));
    } catch (const flows::EmptyWindow&) {
      row = {{"name", w.name}, {"attacker", w.attacker.to_string()}, {"victim", w.victim.to_string()},
             {"duration_s", nullptr}, {"n_pkts", 0}, {"avg_pps", nullptr}, {"avg_size_b", nullptr}};
    }
    std::vector<std::string> fields;
    for (const auto& [key, value] : row.items())
      fields.push_back(value.is_null() ? "" : value.is_string() ? value.get<std::string>() : value.dump());
    csv_out += csv::join(fields) + "\n";
    rows.push_back(std::move(row));
  }
  if (common.format == OutputFormat::Csv)
    outputs.add("stats.csv", csv_out);
  else
    outputs.add("stats.json", rows.dump(2) + "\n");
  outputs.commit(inputs);
  return kOk;
}

int cmd_pipeline(const PipelineArgs& args, const CommonArgs& common, std::ostream&, std::ostream& err) {
  Outputs outputs("pipeline", common);
  Inputs inputs;

  // All inputs are read up front so a missing file fails before any output.
  const auto config_text = inputs.read(args.config);
  const auto profile_text = inputs.read(args.profiles);
  const auto windows_text = inputs.read(args.windows);
  const auto day = parse_day(args.date);

  const auto cfg = planner::assign_nodes(parse_input(args.config, [&] { return model::load_config(config_text); }),
                                         args.nodes);
  const auto plan = planner::emit_deployment_plan(cfg);
  const auto sniffers = planner::plan_sniffers(cfg);
  const auto entries = parse_input(args.profiles, [&] { return traffic::load_profiles(profile_text); });
  const auto windows = parse_input(args.windows, [&] { return flows::load_attack_windows(windows_text, &cfg); });

  const auto jobs = traffic::schedule_day(entries, cfg, day, common.seed);

  // Every client/server pair the schedule uses should be routable.
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& j : jobs) pairs.insert({j.host, j.server});
  for (const auto& [host, server] : pairs) {
    const auto src = cfg.find_host(host)->nics.front().ip;
    const auto dst = cfg.find_host(server)->nics.front().ip;
    const auto verdict = netcheck::trace_path(cfg, src, dst, model::RuleProto::TCP, std::nullopt).verdict;
    if (verdict != netcheck::Verdict::Reachable)
      err << "warning: " << host << " -> " << server << " is " << netcheck::to_string(verdict) << "\n";
  }

  const auto log = traffic::simulate_jobs(jobs, cfg, common.seed);
  std::vector<flows::FlowRecord> records;
  records.reserve(log.flows.size());
  for (const auto& f : log.flows) records.push_back(f.flow);
  const auto labeled = flows::label_flows(std::move(records), windows);

  std::vector<ordered_json> lines;
  for (const auto& j : jobs) lines.push_back(traffic::to_json(j));

  outputs.add("plan.json", planner::to_json(plan).dump(2) + "\n");
  outputs.add("sniffers.json", planner::to_json(sniffers).dump(2) + "\n");
  outputs.add("schedule.jsonl", jsonl(lines));
  outputs.add("synthetic_flows.csv", traffic::export_synthetic_csv(log));
  outputs.add("labeled_flows.csv", flows::export_csv(labeled));
  outputs.commit(inputs);
  err << plan.steps.size() << " plan steps, " << jobs.size() << " jobs, " << log.flows.size() << " flows\n";
  return kOk;
}

}  // namespace testbed::cli
