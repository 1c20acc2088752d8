#include "idsbench/pipeline.hpp"

#include "idsbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace idsbench {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InfrastructureError("cannot write " + path.string());
  out << content;
}

const ArtifactFile& require(const ArtifactFile* f, const std::string& what) {
  if (!f) throw ValidationError("manifest lists no " + what);
  return *f;
}

}  // namespace

PacketTotals stats_totals(const std::vector<IdsStatsRecord>& stats, double window_end) {
  PacketTotals totals;
  totals.elapsed = window_end;
  const IdsStatsRecord* last = nullptr;
  for (auto& s : stats)
    if (s.t <= window_end + 1e-9) last = &s;
  if (!last) return totals;
  if (last->semantics == StatsSemantics::CumulativeTotal) {
    totals.received = std::llround(last->received);
    totals.dropped = std::llround(last->dropped);
  } else {
    totals.received = std::llround(last->received * last->t);
    totals.dropped = std::llround(last->dropped * last->t);
  }
  return totals;
}

ProcessedTest process_artifacts(const fs::path& dir, const ExpectationProfile& priorities,
                                const MessageMapping& mapping) {
  if (!fs::is_directory(dir)) throw ValidationError("not an artifacts directory: " + dir.string());
  if (!fs::exists(dir / "manifest")) throw ValidationError("no manifest in " + dir.string());
  const Manifest manifest = parse_manifest(read_text_file(dir / "manifest"));
  if (manifest.aborted) throw ValidationError("artifacts in " + dir.string() + " come from an aborted run");

  ProcessedTest out;
  out.plan = parse_plan(read_text_file(dir / require(manifest.find("harness", "plan"), "plan").name));
  const PhaseLog phases =
      parse_phase_log(read_text_file(dir / require(manifest.find("harness", "phases"), "phase log").name));
  if (!phases.conforms() || phases.abort_reason) throw ValidationError("phase log is incomplete or out of order");
  const double t0 = *phases.epoch_of(Phase::Evaluation);
  const double end = *phases.epoch_of(Phase::Output) - t0;
  const Window window{0, end};

  // alerts and IDS stats
  const auto& alerts_file = require(manifest.find_type_prefix("alerts:"), "alert log");
  AlertParseResult parsed = alerts_file.type == "alerts:eve"
                                ? load_suricata_eve(dir / alerts_file.name, t0 + alerts_file.clock_offset)
                                : load_snort_fast(dir / alerts_file.name, t0 + alerts_file.clock_offset);
  for (auto& r : parsed.rejects)
    out.warnings.push_back(alerts_file.name + " line " + std::to_string(r.line) + ": " + r.reason);
  std::vector<IdsStatsRecord> stats;
  if (auto* f = manifest.find_type_prefix("stats:")) {
    if (f->type == "stats:eve") {
      stats = f->name == alerts_file.name ? parsed.stats
                                          : load_suricata_eve(dir / f->name, t0 + f->clock_offset).stats;
    } else {
      stats = load_snort_stats(dir / f->name, t0 + f->clock_offset);
    }
  } else {
    out.warnings.push_back("no IDS stats log; packet figures are zero");
  }
  to_runtime_averages(stats);  // rejects counter resets and mixed flavours
  PacketTotals totals = stats_totals(stats, end);

  // monitors
  std::vector<BandwidthSeries> series;
  ResourceSummary resources;
  for (auto& f : manifest.files) {
    if (f.type != "monitor") continue;
    auto role = parse_role(f.role);
    if (!role) throw ValidationError("monitor log with unknown role " + f.role);
    auto samples = load_monitor_log(dir / f.name, t0 + f.clock_offset);
    if (samples.empty()) continue;
    series.push_back(bandwidth_from_monitor(samples, *role, *role != Role::Sender));
    if (*role == Role::Ids) resources = summarize_resources(samples, window);
    if (*role == Role::Sender) {
      std::int64_t sent = 0;
      bool have = true;
      for (auto& s : samples) {
        if (!(s.t > window.start && s.t <= window.end)) continue;
        if (!s.packets_out) {
          have = false;
          break;
        }
        sent += std::llround(*s.packets_out);
      }
      if (have) totals.sent = sent;
    }
  }
  if (resources.sample_count == 0) out.warnings.push_back("no IDS monitor samples; cpu and memory are zero");
  out.bandwidth = align_and_merge(series, window);

  // matching
  const auto expectations = expand_expectations(out.plan, priorities, mapping);
  const MatchTable attributed = attribute(parsed.alerts, out.plan, mapping);
  out.counts = count_matches(attributed, expectations);
  out.table = apply_expectations(attributed, expectations);

  SampleKey key{out.plan.params.target_bandwidth_gbps, out.plan.params.attacks_per_minute, out.plan.params.ids_id};
  out.metrics = compute_sample(key, out.counts, resources, totals);

  write_file(dir / "match_table.csv", to_csv(out.table));
  write_file(dir / "unattributed.csv", unattributed_csv(out.table));
  write_file(dir / "bandwidth.csv", to_csv(out.bandwidth));
  write_file(dir / "sample.json", to_json(out.metrics));
  return out;
}

std::map<SampleKey, SampleMetrics> collect_samples(const fs::path& root) {
  if (!fs::is_directory(root)) throw ValidationError("not a directory: " + root.string());
  std::vector<fs::path> files;
  for (auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() == "sample.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::map<SampleKey, std::vector<SampleMetrics>> grouped;
  for (auto& f : files) {
    auto m = sample_from_json(read_text_file(f));
    grouped[m.key].push_back(std::move(m));
  }
  std::map<SampleKey, SampleMetrics> out;
  for (auto& [key, list] : grouped) out.emplace(key, aggregate(list));
  return out;
}

}  // namespace idsbench
