#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace idsbench {

enum class Role { Sender, Receiver, Ids };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

/// One line of a monitor log, with t re-based to the test start.
struct MonitorSample {
  double t = 0;
  std::vector<double> cpu_per_core;  ///< fractions in [0, 1]
  double memory = 0;                 ///< bytes
  double bytes_in = 0;
  double bytes_out = 0;
  std::optional<double> packets_in;
  std::optional<double> packets_out;

  friend bool operator==(const MonitorSample&, const MonitorSample&) = default;
};

/// Parses `<epoch> CPU <c0> ... | MEM <bytes> | NET <in> <out> [| PKT <in> <out>]`.
std::vector<MonitorSample> parse_monitor_log(std::string_view text, double t0);
std::vector<MonitorSample> load_monitor_log(const std::filesystem::path& path, double t0);
std::string format_monitor_line(double epoch, const MonitorSample& sample);

enum class BandwidthUnit { BitPerSec, KbitPerSec, MbitPerSec, GbitPerSec, BytePerSec };

std::optional<BandwidthUnit> parse_bandwidth_unit(std::string_view name);

/// Regularly sampled throughput in Gbit/s. values[i] covers [start + i*interval, start + (i+1)*interval).
struct BandwidthSeries {
  double start = 0;
  double interval = 1;
  std::vector<double> values;
  Role source_role = Role::Sender;
};

/// Converts `<t> <value>` lines into Gbit/s. t must be non-decreasing.
BandwidthSeries normalize_bandwidth(std::string_view text, BandwidthUnit unit, double interval,
                                    Role role);
BandwidthSeries load_bandwidth(const std::filesystem::path& path, BandwidthUnit unit,
                                    double interval, Role role);

/// Bytes per sample interval from a monitor log, as Gbit/s.
BandwidthSeries bandwidth_from_monitor(const std::vector<MonitorSample>& samples, Role role,
                                       bool inbound, double interval = 1.0);

struct Window {
  double start = 0;
  double end = 0;
};

/// One row per interval of the window; absent cells are nullopt, never zero.
struct MergedTable {
  double interval = 1;
  std::vector<double> t;
  std::optional<std::vector<std::optional<double>>> sender, receiver, ids;

  const std::optional<std::vector<std::optional<double>>>& column(Role role) const;

  friend bool operator==(const MergedTable&, const MergedTable&) = default;
};

/// Throws ValidationError if a series lies entirely outside the window or a role repeats.
MergedTable align_and_merge(const std::vector<BandwidthSeries>& series, Window window);

/// CSV `t,sender_gbps,receiver_gbps,ids_gbps`; t relative to the window start.
std::string to_csv(const MergedTable& table);

struct ResourceSummary {
  std::vector<double> cpu_avg_per_core;
  double cpu_avg = 0;  ///< mean over cores of the per-core means
  double memory_avg = 0;
  std::size_t sample_count = 0;
};

/// Means over samples inside the window; exact duplicate samples count once.
ResourceSummary summarize_resources(const std::vector<MonitorSample>& samples,
                                    std::optional<Window> window = std::nullopt);

}  // namespace idsbench
