#include "idsbench/monitor.hpp"

#include "idsbench/error.hpp"
#include "idsbench/plan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace idsbench {
namespace {

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_number(std::string_view s, int line) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": invalid number '" + std::string(s) + "'");
  return v;
}

template <typename Fn>
void each_line(std::string_view text, Fn&& fn) {
  int n = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++n;
    auto line = text.substr(start, end - start);
    if (auto b = line.find_first_not_of(" \t\r"); b != std::string_view::npos && line[b] != '#')
      fn(n, line);
    start = end + 1;
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Sender: return "sender";
    case Role::Receiver: return "receiver";
    case Role::Ids: return "ids";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "sender") return Role::Sender;
  if (name == "receiver") return Role::Receiver;
  if (name == "ids") return Role::Ids;
  return std::nullopt;
}

std::vector<MonitorSample> parse_monitor_log(std::string_view text, double t0) {
  std::vector<MonitorSample> out;
  each_line(text, [&](int n, std::string_view line) {
    auto tok = tokens(line);
    auto fail = [&](const std::string& why) {
      throw ParseError("line " + std::to_string(n) + ": " + why);
    };
    if (tok.size() < 2 || tok[1] != "CPU") fail("expected '<epoch> CPU ...'");
    MonitorSample s;
    s.t = to_number(tok[0], n) - t0;
    std::size_t i = 2;
    for (; i < tok.size() && tok[i] != "|"; ++i) {
      double c = to_number(tok[i], n);
      if (c < 0 || c > 1) fail("cpu fraction out of [0,1]");
      s.cpu_per_core.push_back(c);
    }
    bool have_mem = false, have_net = false;
    while (i < tok.size()) {
      if (tok[i] != "|") fail("expected '|'");
      ++i;
      if (i >= tok.size()) fail("dangling '|'");
      auto section = tok[i++];
      if (section == "MEM" && i < tok.size()) {
        s.memory = to_number(tok[i++], n);
        if (s.memory < 0) fail("negative memory");
        have_mem = true;
      } else if (section == "NET" && i + 1 < tok.size()) {
        s.bytes_in = to_number(tok[i++], n);
        s.bytes_out = to_number(tok[i++], n);
        have_net = true;
      } else if (section == "PKT" && i + 1 < tok.size()) {
        s.packets_in = to_number(tok[i++], n);
        s.packets_out = to_number(tok[i++], n);
      } else {
        fail("unknown or incomplete section '" + std::string(section) + "'");
      }
    }
    if (!have_mem || !have_net) fail("MEM and NET sections are required");
    if (!out.empty() && s.t < out.back().t) fail("timestamps decrease");
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<MonitorSample> load_monitor_log(const std::filesystem::path& path, double t0) {
  auto text = read_text_file(path);
  try {
    return parse_monitor_log(text, t0);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_monitor_line(double epoch, const MonitorSample& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", epoch);
  std::string line = buf;
  line += " CPU";
  for (double c : s.cpu_per_core) {
    std::snprintf(buf, sizeof buf, " %.6f", c);
    line += buf;
  }
  line += " | MEM " + fmt(s.memory) + " | NET " + fmt(s.bytes_in) + " " + fmt(s.bytes_out);
  if (s.packets_in && s.packets_out) line += " | PKT " + fmt(*s.packets_in) + " " + fmt(*s.packets_out);
  return line;
}

std::optional<BandwidthUnit> parse_bandwidth_unit(std::string_view name) {
  if (name == "bit/s" || name == "bps") return BandwidthUnit::BitPerSec;
  if (name == "Kbit/s" || name == "kbit/s" || name == "Kbps") return BandwidthUnit::KbitPerSec;
  if (name == "Mbit/s" || name == "Mbps") return BandwidthUnit::MbitPerSec;
  if (name == "Gbit/s" || name == "Gbps") return BandwidthUnit::GbitPerSec;
  if (name == "byte/s" || name == "B/s") return BandwidthUnit::BytePerSec;
  return std::nullopt;
}

BandwidthSeries normalize_bandwidth(std::string_view text, BandwidthUnit unit, double interval, Role role) {
  if (!(interval > 0)) throw ValidationError("interval must be positive");
  BandwidthSeries series;
  series.interval = interval;
  series.source_role = role;
  bool first = true;
  double last_t = 0;
  each_line(text, [&](int n, std::string_view line) {
    auto tok = tokens(line);
    if (tok.size() != 2) throw ParseError("line " + std::to_string(n) + ": expected '<t> <value>'");
    double t = to_number(tok[0], n);
    double v = to_number(tok[1], n);
    if (v < 0) throw ValidationError("line " + std::to_string(n) + ": negative bandwidth");
    if (!first && t < last_t)
      throw ValidationError("line " + std::to_string(n) + ": non-monotonic timestamp");
    if (first) series.start = t;
    first = false;
    last_t = t;
    // one multiplication or division per value keeps rational inputs exact to 1 ulp
    double gbps = 0;
    switch (unit) {
      case BandwidthUnit::BitPerSec: gbps = v / 1e9; break;
      case BandwidthUnit::KbitPerSec: gbps = v / 1e6; break;
      case BandwidthUnit::MbitPerSec: gbps = v / 1e3; break;
      case BandwidthUnit::GbitPerSec: gbps = v; break;
      case BandwidthUnit::BytePerSec: gbps = v / 125e6; break;
    }
    series.values.push_back(gbps);
  });
  return series;
}

BandwidthSeries load_bandwidth(const std::filesystem::path& path, BandwidthUnit unit,
                                    double interval, Role role) {
  auto text = read_text_file(path);
  try {
    return normalize_bandwidth(text, unit, interval, role);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

BandwidthSeries bandwidth_from_monitor(const std::vector<MonitorSample>& samples, Role role,
                                       bool inbound, double interval) {
  BandwidthSeries series;
  series.interval = interval;
  series.source_role = role;
  if (samples.empty()) return series;
  // a sample at t reports the bytes of the interval ending at t
  series.start = samples.front().t - interval;
  for (auto& s : samples) series.values.push_back((inbound ? s.bytes_in : s.bytes_out) / 125e6 / interval);
  return series;
}

const std::optional<std::vector<std::optional<double>>>& MergedTable::column(Role role) const {
  switch (role) {
    case Role::Sender: return sender;
    case Role::Receiver: return receiver;
    case Role::Ids: break;
  }
  return ids;
}

MergedTable align_and_merge(const std::vector<BandwidthSeries>& series, Window window) {
  if (!(window.end > window.start)) throw ValidationError("empty alignment window");
  std::set<Role> seen;
  double interval = series.empty() ? 1.0 : series.front().interval;
  for (auto& s : series) {
    if (!seen.insert(s.source_role).second)
      throw ValidationError("two series for role " + std::string(to_string(s.source_role)));
    if (s.interval != interval) throw ValidationError("series intervals differ");
    double s_end = s.start + static_cast<double>(s.values.size()) * s.interval;
    if (s.values.empty() || s_end <= window.start || s.start >= window.end)
      throw ValidationError("series for role " + std::string(to_string(s.source_role)) +
                            " lies entirely outside the window");
  }
  MergedTable table;
  table.interval = interval;
  auto rows = static_cast<std::size_t>(std::ceil((window.end - window.start) / interval - 1e-9));
  for (std::size_t r = 0; r < rows; ++r) table.t.push_back(window.start + static_cast<double>(r) * interval);
  for (auto& s : series) {
    std::vector<std::optional<double>> col(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double pos = (table.t[r] - s.start) / s.interval;
      double idx = std::floor(pos + 1e-9);
      if (idx < 0 || idx >= static_cast<double>(s.values.size())) continue;
      col[r] = s.values[static_cast<std::size_t>(idx)];
    }
    switch (s.source_role) {
      case Role::Sender: table.sender = std::move(col); break;
      case Role::Receiver: table.receiver = std::move(col); break;
      case Role::Ids: table.ids = std::move(col); break;
    }
  }
  return table;
}

std::string to_csv(const MergedTable& table) {
  std::ostringstream out;
  out << "t,sender_gbps,receiver_gbps,ids_gbps\n";
  double start = table.t.empty() ? 0 : table.t.front();
  auto cell = [](const std::optional<std::vector<std::optional<double>>>& col, std::size_t r) {
    if (!col || !(*col)[r]) return std::string{};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", *(*col)[r]);
    return std::string(buf);
  };
  for (std::size_t r = 0; r < table.t.size(); ++r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", table.t[r] - start);
    out << buf << ',' << cell(table.sender, r) << ',' << cell(table.receiver, r) << ','
        << cell(table.ids, r) << '\n';
  }
  return out.str();
}

ResourceSummary summarize_resources(const std::vector<MonitorSample>& samples, std::optional<Window> window) {
  std::vector<const MonitorSample*> used;
  for (auto& s : samples) {
    // a sample at t reports the interval ending at t
    if (window && (s.t <= window->start || s.t > window->end)) continue;
    bool duplicate = false;
    for (auto it = used.rbegin(); it != used.rend() && (*it)->t == s.t; ++it)
      duplicate = duplicate || **it == s;
    if (!duplicate) used.push_back(&s);
  }
  if (used.empty()) throw ValidationError("no monitor samples in the evaluation window");
  ResourceSummary out;
  out.sample_count = used.size();
  std::size_t cores = 0;
  for (auto* s : used) cores = std::max(cores, s->cpu_per_core.size());
  std::vector<double> sum(cores, 0.0);
  std::vector<std::size_t> count(cores, 0);
  double mem = 0;
  for (auto* s : used) {
    for (std::size_t c = 0; c < s->cpu_per_core.size(); ++c) {
      sum[c] += s->cpu_per_core[c];
      ++count[c];
    }
    mem += s->memory;
  }
  for (std::size_t c = 0; c < cores; ++c) out.cpu_avg_per_core.push_back(sum[c] / static_cast<double>(count[c]));
  if (cores > 0) {
    double total = 0;
    for (double v : out.cpu_avg_per_core) total += v;
    out.cpu_avg = total / static_cast<double>(cores);
  }
  out.memory_avg = mem / static_cast<double>(used.size());
  return out;
}

}  // namespace idsbench
