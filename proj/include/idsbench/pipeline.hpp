#pragma once

#include "idsbench/matcher.hpp"
#include "idsbench/metrics.hpp"
#include "idsbench/monitor.hpp"
#include "idsbench/orchestrator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace idsbench {

struct ProcessedTest {
  AttackPlan plan;
  MatchTable table;  ///< with expectations applied
  DetectionCounts counts;
  SampleMetrics metrics;
  MergedTable bandwidth;
  std::vector<std::string> warnings;
};

/// Offline analysis of one artifacts directory. Reads only what the manifest lists and writes
/// match_table.csv, unattributed.csv, bandwidth.csv and sample.json next to it. Deterministic.
ProcessedTest process_artifacts(const std::filesystem::path& dir, const ExpectationProfile& priorities,
                                const MessageMapping& mapping);

/// Received/dropped totals at the end of the window from either stats flavour.
PacketTotals stats_totals(const std::vector<IdsStatsRecord>& stats, double window_end);

/// Every sample.json below root, pooled per key.
std::map<SampleKey, SampleMetrics> collect_samples(const std::filesystem::path& root);

}  // namespace idsbench
