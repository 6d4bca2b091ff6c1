// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "capture_gen.hpp"
#include "consolidate_oracle.hpp"
#include "fixtures.hpp"
#include "flow_oracle.hpp"
#include "testbed/cli/commands.hpp"
#include "testbed/common/random.hpp"
#include "testbed/flows/features.hpp"
#include "testbed/flows/flow.hpp"
#include "testbed/flows/windows.hpp"
#include "testbed/model/validate.hpp"
#include "testbed/netcheck/netcheck.hpp"
#include "testbed/planner/plan.hpp"
#include "testbed/planner/sniffers.hpp"
#include "testbed/scanmerge/consolidate.hpp"
#include "testbed/traffic/schedule.hpp"

using namespace testbed;
namespace fs = std::filesystem;

namespace {

// Limits and tolerances.
constexpr double kDecisionTableBudgetS = 5.0;
constexpr double kAttackTableBudgetS = 30.0;
constexpr double kSchedulerBudgetS = 60.0;
constexpr int kDecisionFuzzPairs = 10000;
constexpr std::int64_t kSizeToleranceB = 1;
constexpr int kSchedulerSeeds = 100;
constexpr int kWebCountLow = 25;
constexpr int kWebCountHigh = 54;
constexpr double kWebMeanTarget = 38.0;
constexpr double kWebMeanTolerance = 2.0;
constexpr int kCaptures = 50;
constexpr std::size_t kMaxCapturePackets = 10000;

// Collects failure notes for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && notes_.size() < 5) notes_.push_back(what);
    failed_ |= !ok;
  }
  bool failed() const { return failed_; }
  std::string notes() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> notes_;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  if (c.failed()) ++failures;
  std::cout << (c.failed() ? "FAIL" : "PASS") << " " << id << " " << name << ": " << detail
            << (c.failed() ? " [" + c.notes() + "]" : "") << std::endl;
}

// ---- 1

scanmerge::OsObservation obs(scanmerge::ScanSource src, std::vector<std::string> cpes,
                             std::optional<std::string> os = std::nullopt) {
  scanmerge::OsObservation o;
  o.source = src;
  for (const auto& c : cpes) o.cpes.push_back(scanmerge::CpeUri::parse(c));
  o.os = std::move(os);
  return o;
}

std::string decision_table(Check& c) {
  using namespace scanmerge;
  const auto t0 = std::chrono::steady_clock::now();
  using Obs = std::optional<OsObservation>;
  const auto N = ScanSource::Nmap;
  const auto V = ScanSource::OpenVAS;
  struct Case {
    const char* label;
    Obs nmap, openvas;
    Outcome want;
    std::optional<std::string> generation;
  };
  const std::vector<Case> cases{
      {"kernel + ubuntu", obs(N, {"cpe:/o:linux:linux_kernel:2.6"}), obs(V, {"cpe:/o:canonical:ubuntu_linux:16.04"}),
       Outcome::UseOpenVASWithVersion, "16.04"},
      {"openvas alone", std::nullopt, obs(V, {"cpe:/o:novell:opensuse:11.4"}), Outcome::UseOpenVASWithVersion, "11.4"},
      {"win7 sp1 + kernel", obs(N, {"cpe:/o:microsoft:windows_7::sp1"}), obs(V, {"cpe:/o:linux:linux_kernel:2.6"}),
       Outcome::UseNmapWithVersion, "SP1"},
      {"nmap alone", obs(N, {"cpe:/o:microsoft:windows_10:1803"}), std::nullopt, Outcome::UseNmapWithVersion, "1803"},
      {"two win10 + nmap 1803", obs(N, {"cpe:/o:microsoft:windows_10:1803"}),
       obs(V, {"cpe:/o:microsoft:windows_10:1709", "cpe:/o:microsoft:windows_10:1803"}), Outcome::UseOpenVASAndNmap,
       "1803"},
      {"two win7 + nmap sp1", obs(N, {"cpe:/o:microsoft:windows_7::sp1"}),
       obs(V, {"cpe:/o:microsoft:windows_7::sp1", "cpe:/o:microsoft:windows_10:1709"}), Outcome::UseOpenVASAndNmap,
       "SP1"},
      {"two ubuntu, no nmap", std::nullopt,
       obs(V, {"cpe:/o:canonical:ubuntu_linux:14.04", "cpe:/o:canonical:ubuntu_linux:16.04"}), Outcome::UseOpenVASOnly,
       std::nullopt},
      {"xp cpe with openvas text", std::nullopt, obs(V, {"cpe:/o:microsoft:windows_xp::sp3"}, "Windows"),
       Outcome::UseOpenVASOnly, std::nullopt},
      {"two windows from nmap", obs(N, {"cpe:/o:microsoft:windows_7::sp1", "cpe:/o:microsoft:windows_10:1803"}),
       std::nullopt, Outcome::UseNmapOnly, std::nullopt},
      {"xp cpe with nmap text", obs(N, {"cpe:/o:microsoft:windows_xp::sp3"}, "Windows"), std::nullopt,
       Outcome::UseNmapOnly, std::nullopt},
      {"nothing", std::nullopt, std::nullopt, Outcome::Fail, std::nullopt},
      {"xp only", obs(N, {"cpe:/o:microsoft:windows_xp::sp3"}), obs(V, {}), Outcome::Fail, std::nullopt},
  };
  std::set<Outcome> seen;
  for (const auto& k : cases) {
    const auto v = consolidate(k.nmap, k.openvas);
    seen.insert(v.outcome);
    c.expect(v.outcome == k.want, std::string(k.label) + " gave " + std::string(to_string(v.outcome)));
    c.expect(v.generation == k.generation, std::string(k.label) + " generation");
  }
  c.expect(seen.size() == 6, "fixture does not cover all six outcomes");

  const auto& cat = testsupport::cpe_catalog();
  Rng rng(derive_seed(1, "acceptance-decision"));
  const std::vector<std::optional<std::string>> os_text{std::nullopt, "Linux", "Windows"};
  const std::vector<std::optional<std::string>> fam_text{std::nullopt, "Ubuntu", "7", "XP"};
  auto draw = [&](ScanSource src, OsObservation& lib) -> std::optional<testsupport::OracleObs> {
    if (rng.uniform_int(0, 4) == 0) return std::nullopt;
    testsupport::OracleObs o;
    lib = OsObservation{};
    lib.source = src;
    const auto n = rng.uniform_int(0, 3);
    for (int k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cat.size()) - 1));
      o.cpes.push_back(idx);
      lib.cpes.push_back(CpeUri::parse(cat[idx].text));
    }
    o.os = lib.os = os_text[static_cast<std::size_t>(rng.uniform_int(0, 2))];
    o.family = lib.family = fam_text[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    return o;
  };
  int mismatches = 0;
  for (int i = 0; i < kDecisionFuzzPairs; ++i) {
    OsObservation ln, lo;
    const auto on = draw(N, ln);
    const auto oo = draw(V, lo);
    const auto v = consolidate(on ? Obs(ln) : std::nullopt, oo ? Obs(lo) : std::nullopt);
    const bool listed = std::find(std::begin(kAllOutcomes), std::end(kAllOutcomes), v.outcome) != std::end(kAllOutcomes);
    c.expect(listed, "unlisted outcome");
    c.expect(!(v.generation && !carries_generation(v.outcome)), "generation on an -Only verdict");
    if (v.outcome != testsupport::oracle_outcome(on, oo)) ++mismatches;
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " fuzz pairs disagree with the reference table");
  const double s = elapsed_s(t0);
  c.expect(s < kDecisionTableBudgetS, "too slow");
  std::ostringstream d;
  d << cases.size() << " fixture pairs, " << kDecisionFuzzPairs << " fuzz pairs, " << s << " s";
  return d.str();
}

// ---- 2

std::string attack_table(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = testsupport::reference_config();
  const auto windows =
      flows::load_attack_windows(testsupport::slurp(testsupport::data_dir() / "reference/attacks.csv"), &cfg);
  struct Row {
    const char* name;
    double duration_s;
    std::uint64_t n_pkts;
    double avg_pps;
    int decimals;
    std::int64_t avg_size_b;
  };
  const Row rows[] = {
      {"Heartbleed", 256.3, 144, 0.6, 1, 720},  {"Bruteforce", 6935.5, 504641, 72.76, 2, 137},
      {"Web", 1665.2, 554, 0.33, 2, 581},        {"LAN", 1167.5, 2816, 2.41, 2, 1464},
      {"PortScan", 838, 24388, 29.10, 2, 61},
  };
  std::ostringstream d;
  for (const auto& row : rows) {
    auto it = std::find_if(windows.begin(), windows.end(), [&](const auto& w) { return w.name == row.name; });
    c.expect(it != windows.end(), std::string("no window ") + row.name);
    if (it == windows.end()) continue;
    auto w = *it;
    // Start and end in the table are cut to whole seconds; the duration is not.
    const auto span_us = static_cast<std::int64_t>(std::llround(row.duration_s * 1e6));
    w.end = std::max(w.end, w.start + Micros{span_us});

    std::vector<flows::PacketMeta> pkts;
    pkts.reserve(row.n_pkts + row.n_pkts / 10 + 2);
    const auto attacker = w.attacker.address();
    const auto victim_net = w.victim.network().value();
    const auto victim_hosts = w.victim.length() == 32 ? 1u : (1u << (32 - w.victim.length())) - 2;
    for (std::uint64_t i = 0; i < row.n_pkts; ++i) {
      flows::PacketMeta p;
      p.ts = w.start + Micros{span_us * static_cast<std::int64_t>(i) / static_cast<std::int64_t>(row.n_pkts - 1)};
      const Ipv4Addr victim(w.victim.length() == 32 ? victim_net
                                                    : victim_net + 1 + static_cast<std::uint32_t>(i % victim_hosts));
      const bool fwd = i % 3 != 2;
      p.src_ip = fwd ? attacker : victim;
      p.dst_ip = fwd ? victim : attacker;
      p.src_port = fwd ? 40000 : 443;
      p.dst_port = fwd ? 443 : 40000;
      // Lengths alternate one byte around the mean.
      p.length = static_cast<std::uint32_t>(row.avg_size_b + (i % 2 == 0 ? 1 : -1));
      p.tcp_flags = flows::kAck;
      pkts.push_back(p);
      // Unrelated traffic in the same interval must not count.
      if (i % 10 == 0) {
        auto noise = p;
        noise.src_ip = Ipv4Addr::parse("10.1.11.3");
        noise.dst_ip = Ipv4Addr::parse("10.2.9.5");
        noise.length = 1500;
        pkts.push_back(noise);
      }
    }
    const auto s = flows::window_stats(pkts, w);
    const double pps = flows::round_to(s.avg_pps, row.decimals);
    c.expect(s.n_pkts == row.n_pkts, std::string(row.name) + " packet count");
    c.expect(std::abs(pps - row.avg_pps) < 1e-9, std::string(row.name) + " avg_pps " + std::to_string(pps));
    c.expect(std::llabs(s.avg_size_b - row.avg_size_b) <= kSizeToleranceB, std::string(row.name) + " avg size");
    d << row.name << " " << flows::format_g6(pps) << "/" << s.avg_size_b << "B ";
  }
  const double s = elapsed_s(t0);
  c.expect(s < kAttackTableBudgetS, "too slow");
  d << s << " s";
  return d.str();
}

// ---- 3

std::string fixture_fidelity(Check& c) {
  const auto cfg = testsupport::reference_config();
  const std::vector<std::tuple<std::string, std::string, int>> table{
      {"LAN1", "10.1.10.0/24", 20}, {"LAN2", "10.1.11.0/24", 5},   {"LAN3", "10.1.8.0/24", 8},
      {"LAN4", "10.1.12.0/24", 4},  {"CED", "10.2.20.0/24", 4},    {"DMZ_INT", "10.2.9.0/24", 4},
      {"DMZ_EXT", "200.100.0.0/26", 2}, {"EXT_HOSTS", "80.0.0.0/8", 3}, {"ATTACKERS", "1.2.3.0/27", 2},
  };
  std::map<std::string, int> hosts_on;
  for (const auto& h : cfg.hosts) {
    std::set<std::string> vlans;
    for (const auto& n : h.nics) vlans.insert(n.vlan);
    for (const auto& v : vlans) ++hosts_on[v];
  }
  for (const auto& [name, cidr, count] : table) {
    const auto* v = cfg.find_vlan(name);
    c.expect(v != nullptr, "missing vlan " + name);
    if (!v) continue;
    c.expect(v->cidr.to_string() == cidr, name + " cidr " + v->cidr.to_string());
    c.expect(hosts_on[name] == count, name + " has " + std::to_string(hosts_on[name]) + " hosts");
  }
  c.expect(std::set<std::string>(cfg.bridges.begin(), cfg.bridges.end()) ==
               std::set<std::string>{"br1", "br2", "br3"},
           "bridges");
  const auto violations = model::validate_config(cfg);
  c.expect(violations.empty(), std::to_string(violations.size()) + " violations");
  return std::to_string(cfg.hosts.size()) + " hosts, " + std::to_string(violations.size()) + " violations";
}

// ---- 4

std::string static_route(Check& c) {
  using namespace netcheck;
  auto cfg = testsupport::reference_config();
  const auto ext = Ipv4Addr::parse("80.20.40.2");
  const auto dmz = Ipv4Addr::parse("200.100.0.8");
  auto has_vr2 = [](const Path& p) {
    return std::any_of(p.hops.begin(), p.hops.end(), [](const Hop& h) { return h.device == "VR2"; });
  };
  const auto there = trace_path(cfg, ext, dmz, model::RuleProto::TCP, 443);
  const auto back = trace_path(cfg, dmz, ext, model::RuleProto::TCP, 40000);
  c.expect(there.verdict == Verdict::Reachable, "forward " + std::string(to_string(there.verdict)));
  c.expect(has_vr2(there), "VR2 not on the forward path");
  c.expect(back.verdict == Verdict::Reachable, "reverse " + std::string(to_string(back.verdict)));

  for (auto& r : cfg.routers)
    if (r.name == "VR2")
      std::erase_if(r.static_routes, [&](const model::StaticRoute& s) { return s.prefix.contains(dmz); });
  const auto cut = trace_path(cfg, ext, dmz, model::RuleProto::TCP, 443);
  c.expect(cut.verdict == Verdict::NoRoute, "without the route " + std::string(to_string(cut.verdict)));
  return "forward " + std::string(to_string(there.verdict)) + " (" + std::to_string(there.hops.size()) +
         " hops), reverse " + std::string(to_string(back.verdict)) + ", without route " +
         std::string(to_string(cut.verdict));
}

// ---- 5

std::string scheduler_bounds(Check& c) {
  using namespace traffic;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = testsupport::reference_config();
  const auto entries = load_profiles(testsupport::slurp(testsupport::data_dir() / "reference/profiles.csv"));
  const std::chrono::year_month_day day{std::chrono::year{2018}, std::chrono::month{7}, std::chrono::day{25}};
  const auto lo = std::chrono::hours{9};
  const auto hi = std::chrono::hours{18} + std::chrono::minutes{30};

  std::uint64_t web_jobs = 0, host_days = 0, smb_files = 0;
  int min_count = 1 << 30, max_count = 0;
  for (int seed = 0; seed < kSchedulerSeeds; ++seed) {
    const auto jobs = schedule_day(entries, cfg, day, static_cast<std::uint64_t>(seed));
    std::map<std::string, int> per_host;
    for (const auto& j : jobs) {
      if (j.type == JobType::WEB) {
        ++per_host[j.host];
        const auto tod = j.start_ts - std::chrono::floor<std::chrono::days>(j.start_ts);
        c.expect(tod >= lo && tod <= hi, "WEB job outside 9:00-18:30");
        const auto& p = std::get<WebParams>(j.params);
        c.expect(p.n_requests >= 1 && p.n_requests <= 20, "n_requests");
        c.expect(p.click_depth_limit == kClickDepthLimit, "depth limit");
        for (double w : p.waits) c.expect(w >= 5.0 && w <= 10.0, "wait");
        for (const auto& page : p.pages)
          c.expect(std::count(page.begin(), page.end(), '/') - (page == "/" ? 1 : 0) <= kClickDepthLimit, "depth");
      } else if (j.type == JobType::SMB) {
        for (auto s : std::get<FileParams>(j.params).sizes) {
          c.expect(s > 0 && s % 8192 == 0, "SMB size " + std::to_string(s));
          ++smb_files;
        }
      }
    }
    for (const auto& [host, n] : per_host) {
      min_count = std::min(min_count, n);
      max_count = std::max(max_count, n);
      web_jobs += static_cast<std::uint64_t>(n);
      ++host_days;
      c.expect(n >= kWebCountLow && n <= kWebCountHigh, host + " has " + std::to_string(n) + " WEB jobs");
    }
  }
  const double mean = host_days ? static_cast<double>(web_jobs) / static_cast<double>(host_days) : 0.0;
  c.expect(std::abs(mean - kWebMeanTarget) <= kWebMeanTolerance, "mean " + std::to_string(mean));
  c.expect(smb_files > 0, "no SMB jobs");
  const double s = elapsed_s(t0);
  c.expect(s < kSchedulerBudgetS, "too slow");
  std::ostringstream d;
  d << kSchedulerSeeds << " seeds, per-host WEB jobs " << min_count << ".." << max_count << " mean " << mean << ", "
    << smb_files << " SMB files, " << s << " s";
  return d.str();
}

// ---- 6

std::string flow_oracle(Check& c) {
  Rng rng(derive_seed(6, "acceptance-flows"));
  std::uint64_t total_pkts = 0, total_flows = 0;
  for (int i = 0; i < kCaptures; ++i) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(kMaxCapturePackets)));
    const auto pkts = testsupport::random_capture(rng, n);
    const double timeout = i % 2 ? flows::kDefaultIdleTimeoutS : 30.0;
    const auto got = flows::assemble_flows(pkts, timeout);
    const auto want = testsupport::oracle_flows(pkts, static_cast<std::int64_t>(timeout * 1e6));
    c.expect(got.size() == want.size(), "capture " + std::to_string(i) + " flow count");
    std::uint64_t conserved = 0;
    for (std::size_t k = 0; k < std::min(got.size(), want.size()); ++k) {
      c.expect(got[k].fwd_pkts == want[k].fwd && got[k].bwd_pkts == want[k].bwd,
               "capture " + std::to_string(i) + " flow " + std::to_string(k));
    }
    for (const auto& f : got) conserved += f.fwd_pkts + f.bwd_pkts;
    c.expect(conserved == pkts.size(), "capture " + std::to_string(i) + " lost packets");
    total_pkts += pkts.size();
    total_flows += got.size();
  }
  return std::to_string(kCaptures) + " captures, " + std::to_string(total_pkts) + " packets, " +
         std::to_string(total_flows) + " flows";
}

// ---- 7

std::string sniffer_partition(Check& c) {
  const std::vector<model::NodeId> nodes{"node1", "node2"};
  const auto cfg = planner::assign_nodes(testsupport::reference_config(), nodes);
  const auto plan = planner::plan_sniffers(cfg);

  std::set<std::pair<std::string, std::string>> populated;
  std::size_t nics = 0;
  for (const auto& h : cfg.hosts)
    for (std::size_t i = 0; i < h.nics.size(); ++i) {
      populated.insert({*h.node, cfg.find_vlan(h.nics[i].vlan)->bridge});
      ++nics;
    }
  std::map<std::string, int> seen;
  std::map<std::pair<std::string, std::string>, int> per_pair;
  for (const auto& s : plan.sniffers) {
    ++per_pair[{s.node, s.bridge}];
    for (const auto& t : s.taps)
      for (const auto& src : t.mirror_sources) ++seen[src];
  }
  for (const auto& h : cfg.hosts)
    for (std::size_t i = 0; i < h.nics.size(); ++i) {
      const auto id = planner::nic_id(h, i);
      c.expect(seen[id] == 1, id + " mirrored " + std::to_string(seen[id]) + " times");
    }
  c.expect(seen.size() == nics, "mirror sources that are not VM nics");
  for (const auto& pair : populated) c.expect(per_pair[pair] == 1, "sniffers on " + pair.first + "/" + pair.second);
  c.expect(per_pair.size() == populated.size(), "sniffer on an empty pair");
  return std::to_string(plan.sniffers.size()) + " sniffers, " + std::to_string(nics) + " nics";
}

// ---- 8

std::string determinism(Check& c) {
  const fs::path root = fs::path(TESTBED_SCRATCH_DIR) / "acceptance-determinism";
  fs::remove_all(root);
  ::setenv("SOURCE_DATE_EPOCH", "1532527200", 1);
  cli::PipelineArgs args;
  args.config = testsupport::data_dir() / "reference/config.json";
  args.profiles = testsupport::data_dir() / "reference/profiles.csv";
  args.windows = testsupport::data_dir() / "reference/attacks.csv";
  std::ostringstream out, err;
  const int a = cli::guarded(err, [&] { return cli::cmd_pipeline(args, {42, root / "a"}, out, err); });
  const int b = cli::guarded(err, [&] { return cli::cmd_pipeline(args, {42, root / "b"}, out, err); });
  ::unsetenv("SOURCE_DATE_EPOCH");
  c.expect(a == 0 && b == 0, "pipeline failed: " + err.str());

  std::size_t files = 0, bytes = 0;
  if (a == 0 && b == 0) {
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), root / "a");
      const auto x = testsupport::slurp(e.path());
      c.expect(fs::exists(root / "b" / rel) && x == testsupport::slurp(root / "b" / rel), rel.string() + " differs");
      ++files;
      bytes += x.size();
    }
    std::size_t other = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "b")) other += e.is_regular_file();
    c.expect(other == files, "file sets differ");
    c.expect(files == 6, std::to_string(files) + " artifacts");
  }
  fs::remove_all(root);
  return std::to_string(files) + " artifacts, " + std::to_string(bytes) + " bytes compared";
}

}  // namespace

int main() {
  report(1, "decision table", decision_table);
  report(2, "attack table rounding", attack_table);
  report(3, "reference fixture", fixture_fidelity);
  report(4, "static route", static_route);
  report(5, "scheduler bounds", scheduler_bounds);
  report(6, "flow oracle", flow_oracle);
  report(7, "sniffer partition", sniffer_partition);
  report(8, "determinism", determinism);
  return failures == 0 ? 0 : 1;
}
