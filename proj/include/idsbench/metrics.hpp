#pragma once

#include "idsbench/matcher.hpp"
#include "idsbench/monitor.hpp"
#include "idsbench/rational.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace idsbench {

struct SampleKey {
  Rational bandwidth_gbps{1};
  int attacks_per_minute = 1;
  std::string ids_id = "mock";

  void validate() const;
  friend bool operator==(const SampleKey&, const SampleKey&) = default;
  friend bool operator<(const SampleKey& a, const SampleKey& b) {
    if (a.ids_id != b.ids_id) return a.ids_id < b.ids_id;
    if (a.bandwidth_gbps != b.bandwidth_gbps) return a.bandwidth_gbps < b.bandwidth_gbps;
    return a.attacks_per_minute < b.attacks_per_minute;
  }
};

/// Packet counts over the evaluation window.
struct PacketTotals {
  std::int64_t received = 0;
  std::int64_t dropped = 0;
  std::optional<std::int64_t> sent;  ///< absent when the sender log has no packet counts
  double elapsed = 0;                ///< seconds

  friend bool operator==(const PacketTotals&, const PacketTotals&) = default;
};

/// nullopt stands for an undefined ratio (zero denominator).
using Ratio = std::optional<Rational>;

Ratio ratio(std::int64_t num, std::int64_t den);
std::string format_ratio(const Ratio& r, int digits = 6);

struct SampleMetrics {
  SampleKey key;
  std::int64_t tp = 0, fp = 0, fn = 0;
  Ratio tpr, precision, far;
  double cpu_avg = 0;
  double memory_avg = 0;
  double rp = 0;  ///< received packets per second
  Ratio dp;       ///< dropped / (received + dropped)
  std::optional<double> sp;  ///< sent packets per second
  std::optional<std::int64_t> unconsidered;

  // support, so samples can be pooled again later
  PacketTotals totals;
  std::size_t resource_samples = 0;
  std::size_t tests = 1;

  friend bool operator==(const SampleMetrics&, const SampleMetrics&) = default;
};

SampleMetrics compute_sample(const SampleKey& key, const DetectionCounts& counts, const ResourceSummary& resources,
                             const PacketTotals& totals);

/// Sums counts and packet totals first, then applies the ratio formulas; cpu and memory are
/// weighted by sample count. Throws ValidationError on an empty list or mixed keys.
SampleMetrics aggregate(const std::vector<SampleMetrics>& tests);

/// Same pooling without the key check; the result carries `key`.
SampleMetrics pool(const std::vector<SampleMetrics>& tests, const SampleKey& key);

struct GridReport {
  std::string bandwidth_csv;  ///< one row per (ids, bandwidth), pooled over attack rates
  std::string attacks_csv;    ///< one row per (ids, attack rate), pooled over bandwidths
  std::string grid_csv;       ///< one row per sample
};

inline constexpr std::string_view kReportHeader = "key,tp,fp,fn,tpr,precision,far,cpu_avg,mem_avg,rp,dp,sp,unconsidered";

GridReport grid_report(const std::map<SampleKey, SampleMetrics>& samples);
void write_grid_report(const GridReport& report, const std::filesystem::path& dir);

std::string to_json(const SampleMetrics& m);
SampleMetrics sample_from_json(std::string_view text);

}  // namespace idsbench
