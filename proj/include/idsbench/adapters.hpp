#pragma once

#include "idsbench/ipv4.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace idsbench {

/// Normalized IDS alert, independent of the log format it came from.
struct AlertRecord {
  double t = 0;  ///< seconds since test start
  std::string message;
  Ipv4 src_addr;
  Ipv4 dst_addr;
  std::string protocol;  ///< "TCP", "UDP", "ICMP" or the raw token

  friend bool operator==(const AlertRecord&, const AlertRecord&) = default;
};

enum class StatsSemantics { CumulativeTotal, RuntimeAverageRate };

struct IdsStatsRecord {
  double t = 0;
  double received = 0;
  double dropped = 0;
  StatsSemantics semantics = StatsSemantics::CumulativeTotal;

  friend bool operator==(const IdsStatsRecord&, const IdsStatsRecord&) = default;
};

struct RejectedLine {
  int line = 0;
  std::string text;
  std::string reason;
};

struct AlertParseResult {
  std::vector<AlertRecord> alerts;
  std::vector<IdsStatsRecord> stats;
  std::vector<RejectedLine> rejects;
};

/// Above this fraction of malformed lines a log is treated as the wrong format.
inline constexpr double kMaxRejectFraction = 0.10;

/// Fast-alert text; t0 is the epoch (seconds, may be fractional) of test start.
/// The year is taken from t0 since the format omits it. Times are UTC.
AlertParseResult parse_snort_fast(std::string_view text, double t0);
AlertParseResult load_snort_fast(const std::filesystem::path& path, double t0);

/// One JSON object per line with event_type "alert" or "stats".
AlertParseResult parse_suricata_eve(std::string_view text, double t0);
AlertParseResult load_suricata_eve(const std::filesystem::path& path, double t0);

/// `<epoch> <received_avg> <dropped_avg>` lines (runtime averages).
std::vector<IdsStatsRecord> parse_snort_stats(std::string_view text, double t0);
std::vector<IdsStatsRecord> load_snort_stats(const std::filesystem::path& path, double t0);

/// Cumulative totals become total(t)/t; averages pass through. t <= 0 records are dropped.
std::vector<IdsStatsRecord> to_runtime_averages(const std::vector<IdsStatsRecord>& stats);

// Emitters, the inverse of the parsers above. Times are microseconds since the epoch.
std::string format_fast_alert(std::int64_t epoch_us, const std::string& message, std::uint32_t sid,
                              const std::string& protocol, Ipv4 src, std::uint16_t src_port,
                              Ipv4 dst, std::uint16_t dst_port);
std::string format_eve_alert(std::int64_t epoch_us, const std::string& message, std::uint32_t sid,
                             const std::string& protocol, Ipv4 src, std::uint16_t src_port, Ipv4 dst,
                             std::uint16_t dst_port);
std::string format_eve_stats(std::int64_t epoch_us, std::uint64_t kernel_packets,
                             std::uint64_t kernel_drops, double uptime);
std::string format_snort_stats(std::int64_t epoch_us, double received_avg, double dropped_avg);

/// Epoch microseconds of a fast-alert stamp ("MM/DD-HH:MM:SS.ffffff") in the given year.
std::int64_t parse_fast_timestamp(std::string_view stamp, int year);
/// ISO-8601 with optional fraction and "+hhmm"/"Z" offset.
std::int64_t parse_iso_timestamp(std::string_view stamp);

}  // namespace idsbench
