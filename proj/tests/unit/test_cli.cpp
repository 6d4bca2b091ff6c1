#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "testbed/cli/commands.hpp"

using namespace testbed;
using namespace testbed::cli;
namespace fs = std::filesystem;
using testsupport::ScratchDir;

namespace {

fs::path ref(const std::string& name) { return testsupport::data_dir() / "reference" / name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

template <typename F>
Run run(F&& fn) {
  std::ostringstream out, err;
  const int code = guarded(err, [&] { return fn(out, err); });
  return {code, out.str(), err.str()};
}

PipelineArgs reference_pipeline() {
  PipelineArgs a;
  a.config = ref("config.json");
  a.profiles = ref("profiles.csv");
  a.windows = ref("attacks.csv");
  return a;
}

std::size_t entries_in(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

}  // namespace

TEST_CASE("merge-scans writes verdicts and coverage") {
  ScratchDir dir("merge");
  MergeScansArgs args{{ref("scans/nmap.xml")}, {ref("scans/openvas.csv")}};
  const auto r = run([&](auto& out, auto& err) { return cmd_merge_scans(args, {0, dir.path()}, out, err); });
  CHECK(r.code == 0);
  REQUIRE(fs::exists(dir / "verdicts.json"));
  REQUIRE(fs::exists(dir / "coverage.json"));
  REQUIRE(fs::exists(dir / "manifest.json"));

  const auto verdicts = nlohmann::json::parse(testsupport::slurp(dir / "verdicts.json"));
  bool has_fail = false;
  for (const auto& v : verdicts) has_fail |= v["outcome"] == "Fail";
  CHECK(has_fail);
  const auto coverage = nlohmann::json::parse(testsupport::slurp(dir / "coverage.json"));
  CHECK(coverage["total"] == 5);
  CHECK(coverage["with_generation"] == 4);
  const auto manifest = nlohmann::json::parse(testsupport::slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "merge-scans");
  CHECK(manifest["inputs"].size() == 2);
}

TEST_CASE("merge-scans names the malformed file") {
  ScratchDir dir("merge-bad");
  testsupport::spit(dir / "broken.xml", "<nmaprun><host>");
  MergeScansArgs args{{dir / "broken.xml"}, {}};
  const auto r = run([&](auto& out, auto& err) { return cmd_merge_scans(args, {0, dir / "out"}, out, err); });
  CHECK(r.code == kSyntaxError);
  CHECK(r.err.find("broken.xml") != std::string::npos);
  CHECK(entries_in(dir / "out") == 0);
}

TEST_CASE("missing input is an io error") {
  ScratchDir dir("missing");
  MergeScansArgs args{{dir / "nope.xml"}, {}};
  CHECK(run([&](auto& out, auto& err) { return cmd_merge_scans(args, {0, dir / "out"}, out, err); }).code == kIoError);
  auto p = reference_pipeline();
  p.profiles = dir / "nope.csv";
  CHECK(run([&](auto& out, auto& err) { return cmd_pipeline(p, {1, dir / "out"}, out, err); }).code == kIoError);
  CHECK(entries_in(dir / "out") == 0);
}

TEST_CASE("output directory is required where files are produced") {
  ConfigArgs args{ref("config.json")};
  CHECK(run([&](auto& out, auto& err) { return cmd_plan(args, {}, out, err); }).code == kIoError);
}

TEST_CASE("validate prints violations") {
  const auto ok = run([&](auto& out, auto& err) { return cmd_validate({ref("config.json")}, {}, out, err); });
  CHECK(ok.code == 0);
  CHECK(nlohmann::json::parse(ok.out).empty());

  ScratchDir dir("validate");
  auto doc = nlohmann::json::parse(testsupport::slurp(ref("config.json")));
  doc["hosts"][0]["nics"][0]["vlan"] = "NOWHERE";
  testsupport::spit(dir / "bad.json", doc.dump());
  const auto bad = run([&](auto& out, auto& err) { return cmd_validate({dir / "bad.json"}, {}, out, err); });
  CHECK(bad.code == kValidationError);
  CHECK_FALSE(nlohmann::json::parse(bad.out).empty());
  CommonArgs csv;
  csv.format = OutputFormat::Csv;
  const auto as_csv = run([&](auto& out, auto& err) { return cmd_validate({dir / "bad.json"}, csv, out, err); });
  CHECK(as_csv.out.rfind("severity,path,message\n", 0) == 0);

  testsupport::spit(dir / "garbage.json", "{");
  CHECK(run([&](auto& out, auto& err) { return cmd_validate({dir / "garbage.json"}, {}, out, err); }).code ==
        kSyntaxError);
}

TEST_CASE("route-check prints one json line") {
  RouteCheckArgs args{ref("config.json"), "80.20.40.2", "200.100.0.8", "tcp", 443};
  const auto r = run([&](auto& out, auto& err) { return cmd_route_check(args, {}, out, err); });
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "Reachable");
  args.proto = "icmp";
  CHECK(run([&](auto& out, auto& err) { return cmd_route_check(args, {}, out, err); }).code == kSyntaxError);
  args = {ref("config.json"), "172.16.0.1", "200.100.0.8", "tcp", std::nullopt};
  CHECK(run([&](auto& out, auto& err) { return cmd_route_check(args, {}, out, err); }).code == kValidationError);
}

TEST_CASE("plan writes scripts per host") {
  ScratchDir dir("plan");
  const auto r = run([&](auto& out, auto& err) { return cmd_plan({ref("config.json")}, {0, dir.path()}, out, err); });
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "plan.json"));
  CHECK(fs::exists(dir.path() / "scripts" / "h1.sh"));
  CHECK(fs::exists(dir.path() / "scripts" / "lan1-11.bat"));
}

TEST_CASE("pipeline produces every artifact, reproducibly") {
  ::setenv("SOURCE_DATE_EPOCH", "1532527200", 1);
  ScratchDir a("pipeline-a"), b("pipeline-b");
  const auto args = reference_pipeline();
  const auto ra = run([&](auto& out, auto& err) { return cmd_pipeline(args, {7, a.path()}, out, err); });
  const auto rb = run([&](auto& out, auto& err) { return cmd_pipeline(args, {7, b.path()}, out, err); });
  ::unsetenv("SOURCE_DATE_EPOCH");
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  for (const char* name : {"plan.json", "sniffers.json", "schedule.jsonl", "synthetic_flows.csv", "labeled_flows.csv",
                           "manifest.json"}) {
    INFO(name);
    REQUIRE(fs::exists(a / name));
    CHECK(testsupport::slurp(a / name) == testsupport::slurp(b / name));
  }
  const auto manifest = nlohmann::json::parse(testsupport::slurp(a / "manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["started"] == "2018-07-25T14:00:00.000000Z");
  CHECK(manifest["outputs"].size() == 5);
}
