#pragma once

#include "idsbench/adapters.hpp"
#include "idsbench/monitor.hpp"
#include "idsbench/plan.hpp"
#include "idsbench/rational.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace idsbench {

enum class StatsStyle { SnortLike, SuricataLike };

std::string_view to_string(StatsStyle style);
std::optional<StatsStyle> parse_stats_style(std::string_view name);

struct DetectionRule {
  std::string message;
  Priority priority = Priority::Required;
};

/// Behavioural model of an IDS: a hard capacity cap plus a table of messages per attack type.
struct MockIdsConfig {
  Rational capacity_gbps{1};
  std::map<AttackType, std::vector<DetectionRule>> detection_table;
  /// Suppression probability per concurrent attack above the knee.
  double detection_degradation = 0;
  int degradation_knee = 0;
  /// Fraction of optional messages that fire for an analyzed attack.
  double optional_emit_fraction = 0.5;
  StatsStyle stats_style = StatsStyle::SuricataLike;
  std::uint64_t memory_footprint = 80ull * 1024 * 1024;
  double ready_delay = 0;  ///< real seconds before READY
  bool never_ready = false;
  double base_cpu = 0.3;
  int cores = 4;
  int flood_alert_threshold = kDefaultFloodThreshold;
  /// Canonical message -> alternative spellings the mock may log instead.
  MessageMapping aliases;

  /// Throws ValidationError on an out-of-range field.
  void validate() const;
};

/// Detection table drawn from a profile: every entry, wildcard patterns emitted as their prefix.
std::map<AttackType, std::vector<DetectionRule>> detection_table_from(const ExpectationProfile& profile);

/// One attack replay as offered on the wire.
struct OfferedAttack {
  AttackType type = AttackType::SynScan;
  std::string trace_id;
  Ipv4 source;
  Ipv4 target;
  double start = 0;     ///< logical seconds since test start
  double duration = 0;  ///< first to last packet
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::string protocol = "TCP";
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  int concurrent = 1;  ///< attacks scheduled in the same minute
};

/// Traffic offered during [index, index + 1) logical seconds.
struct IntervalTraffic {
  std::int64_t index = 0;
  std::uint64_t background_packets = 0;
  std::uint64_t background_bytes = 0;
  std::vector<OfferedAttack> attacks;

  std::uint64_t offered_packets() const;
  std::uint64_t offered_bytes() const;
};

struct IntervalOutcome {
  std::uint64_t offered = 0;
  std::uint64_t received = 0;
  std::uint64_t dropped = 0;
  double offered_gbps = 0;
  double analyzed_gbps = 0;
  MonitorSample ids_sample;
};

/// Deterministic single-worker IDS model. Feed intervals in order.
class MockIdsEngine {
 public:
  MockIdsEngine(MockIdsConfig config, double t0_epoch);

  IntervalOutcome process(const IntervalTraffic& traffic);

  const std::vector<std::string>& alert_lines() const { return alert_lines_; }
  const std::vector<std::string>& stats_lines() const { return stats_lines_; }
  const std::vector<std::string>& monitor_lines() const { return monitor_lines_; }
  const std::vector<AlertRecord>& alerts() const { return alerts_; }
  /// Cumulative (received, dropped) after each interval, with t in seconds.
  const std::vector<IdsStatsRecord>& cumulative() const { return cumulative_; }
  const std::set<Ipv4>& observed_sources() const { return observed_; }
  const std::vector<std::string>& analyzed_traces() const { return analyzed_; }
  const std::vector<std::string>& dropped_traces() const { return dropped_traces_; }
  const MockIdsConfig& config() const { return config_; }

 private:
  void detect(const OfferedAttack& attack);

  MockIdsConfig config_;
  std::int64_t t0_us_;
  std::uint64_t total_received_ = 0;
  std::uint64_t total_dropped_ = 0;
  std::vector<std::string> alert_lines_, stats_lines_, monitor_lines_;
  std::vector<AlertRecord> alerts_;
  std::vector<IdsStatsRecord> cumulative_;
  std::set<Ipv4> observed_;
  std::vector<std::string> analyzed_, dropped_traces_;
};

struct MockIdsOutput {
  std::string alert_log;
  std::string stats_log;
  std::string monitor_log;
  std::vector<IntervalOutcome> intervals;
};

/// Runs the engine over a complete offered timeline.
MockIdsOutput mock_ids_run(const MockIdsConfig& config, const std::vector<IntervalTraffic>& offered,
                           double t0_epoch);

}  // namespace idsbench
