#include "idsbench/adapters.hpp"

#include "idsbench/error.hpp"
#include "idsbench/plan.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>

namespace idsbench {
namespace {

using json = nlohmann::json;

constexpr std::int64_t kMicrosPerDay = 86'400LL * 1'000'000;

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t year;
  unsigned month, day;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

unsigned digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) throw ParseError("timestamp too short");
  unsigned v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') throw ParseError("bad digit in timestamp '" + std::string(s) + "'");
    v = v * 10 + static_cast<unsigned>(s[i] - '0');
  }
  return v;
}

void expect_char(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c)
    throw ParseError("malformed timestamp '" + std::string(s) + "'");
}

std::int64_t fraction_micros(std::string_view s, std::size_t& pos) {
  if (pos >= s.size() || s[pos] != '.') return 0;
  ++pos;
  std::int64_t us = 0;
  int n = 0;
  while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
    if (n < 6) us = us * 10 + (s[pos] - '0');
    ++n;
    ++pos;
  }
  if (n == 0) throw ParseError("empty fraction in timestamp '" + std::string(s) + "'");
  for (; n < 6; ++n) us *= 10;
  return us;
}

std::int64_t t0_micros(double t0) { return std::llround(t0 * 1e6); }

double rebase(std::int64_t epoch_us, double t0) {
  return static_cast<double>(epoch_us - t0_micros(t0)) / 1e6;
}

int year_of(double t0) {
  return static_cast<int>(civil_from_days(floor_div(t0_micros(t0), kMicrosPerDay)).year);
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename Fn>
int each_line(std::string_view text, Fn&& fn) {
  int n = 0, nonblank = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++n;
    auto line = trim(text.substr(start, end - start));
    if (!line.empty()) {
      ++nonblank;
      fn(n, line);
    }
    start = end + 1;
  }
  return nonblank;
}

void check_reject_ratio(const AlertParseResult& r, int lines, std::string_view format) {
  if (lines > 0 && static_cast<double>(r.rejects.size()) > kMaxRejectFraction * lines)
    throw ParseError(std::to_string(r.rejects.size()) + " of " + std::to_string(lines) +
                     " lines are not valid " + std::string(format) + " (first: line " +
                     std::to_string(r.rejects.front().line) + ": " + r.rejects.front().reason + ")");
}

/// "ip:port" or bare "ip".
Ipv4 parse_endpoint(std::string_view s) {
  auto colon = s.find(':');
  auto addr = Ipv4::parse(s.substr(0, colon));
  if (!addr) throw ParseError("bad address '" + std::string(s) + "'");
  if (colon != std::string_view::npos) {
    unsigned port = 0;
    auto ps = s.substr(colon + 1);
    auto [p, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), port);
    if (ec != std::errc{} || p != ps.data() + ps.size() || port > 65535)
      throw ParseError("bad port in '" + std::string(s) + "'");
  }
  return *addr;
}

AlertRecord parse_fast_line(std::string_view line, int year, double t0) {
  auto first = line.find("[**]");
  if (first == std::string_view::npos) throw ParseError("missing '[**]'");
  AlertRecord a;
  a.t = rebase(parse_fast_timestamp(trim(line.substr(0, first)), year), t0);
  auto rest = trim(line.substr(first + 4));
  // [gid:sid:rev]
  if (rest.empty() || rest.front() != '[') throw ParseError("missing [gid:sid:rev]");
  auto close = rest.find(']');
  if (close == std::string_view::npos) throw ParseError("unterminated [gid:sid:rev]");
  rest = trim(rest.substr(close + 1));
  auto second = rest.find("[**]");
  if (second == std::string_view::npos) throw ParseError("missing closing '[**]'");
  a.message = std::string(trim(rest.substr(0, second)));
  if (a.message.empty()) throw ParseError("empty message");
  rest = rest.substr(second + 4);
  auto brace = rest.find('{');
  if (brace == std::string_view::npos) throw ParseError("missing {PROTO}");
  rest = rest.substr(brace + 1);
  auto brace_end = rest.find('}');
  if (brace_end == std::string_view::npos) throw ParseError("missing {PROTO}");
  a.protocol = std::string(rest.substr(0, brace_end));
  auto endpoints = trim(rest.substr(brace_end + 1));
  auto arrow = endpoints.find("->");
  if (arrow == std::string_view::npos) throw ParseError("missing '->'");
  a.src_addr = parse_endpoint(trim(endpoints.substr(0, arrow)));
  a.dst_addr = parse_endpoint(trim(endpoints.substr(arrow + 2)));
  return a;
}

std::string fmt_fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string iso_timestamp(std::int64_t epoch_us) {
  auto days = floor_div(epoch_us, kMicrosPerDay);
  auto in_day = epoch_us - days * kMicrosPerDay;
  auto c = civil_from_days(days);
  auto secs = in_day / 1'000'000;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%06lld+0000",
                static_cast<long long>(c.year), c.month, c.day, static_cast<long long>(secs / 3600),
                static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60),
                static_cast<long long>(in_day % 1'000'000));
  return buf;
}

}  // namespace

std::int64_t parse_fast_timestamp(std::string_view s, int year) {
  unsigned month = digits(s, 0, 2);
  expect_char(s, 2, '/');
  unsigned day = digits(s, 3, 2);
  expect_char(s, 5, '-');
  unsigned hh = digits(s, 6, 2);
  expect_char(s, 8, ':');
  unsigned mm = digits(s, 9, 2);
  expect_char(s, 11, ':');
  unsigned ss = digits(s, 12, 2);
  std::size_t pos = 14;
  auto frac = fraction_micros(s, pos);
  if (pos != s.size()) throw ParseError("trailing characters in timestamp '" + std::string(s) + "'");
  if (month < 1 || month > 12 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 60)
    throw ParseError("timestamp field out of range '" + std::string(s) + "'");
  auto days = days_from_civil(year, month, day);
  return days * kMicrosPerDay + (hh * 3600LL + mm * 60LL + ss) * 1'000'000 + frac;
}

std::int64_t parse_iso_timestamp(std::string_view s) {
  unsigned year = digits(s, 0, 4);
  expect_char(s, 4, '-');
  unsigned month = digits(s, 5, 2);
  expect_char(s, 7, '-');
  unsigned day = digits(s, 8, 2);
  expect_char(s, 10, 'T');
  unsigned hh = digits(s, 11, 2);
  expect_char(s, 13, ':');
  unsigned mm = digits(s, 14, 2);
  expect_char(s, 16, ':');
  unsigned ss = digits(s, 17, 2);
  std::size_t pos = 19;
  auto frac = fraction_micros(s, pos);
  std::int64_t offset_s = 0;
  if (pos < s.size() && s[pos] == 'Z') {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    int sign = s[pos] == '-' ? -1 : 1;
    unsigned oh = digits(s, pos + 1, 2);
    std::size_t p = pos + 3;
    if (p < s.size() && s[p] == ':') ++p;
    unsigned om = digits(s, p, 2);
    offset_s = sign * static_cast<std::int64_t>(oh * 3600 + om * 60);
    pos = p + 2;
  }
  if (pos != s.size()) throw ParseError("trailing characters in timestamp '" + std::string(s) + "'");
  auto days = days_from_civil(year, month, day);
  return days * kMicrosPerDay + (hh * 3600LL + mm * 60LL + ss - offset_s) * 1'000'000 + frac;
}

AlertParseResult parse_snort_fast(std::string_view text, double t0) {
  AlertParseResult result;
  int year = year_of(t0);
  int lines = each_line(text, [&](int n, std::string_view line) {
    try {
      result.alerts.push_back(parse_fast_line(line, year, t0));
    } catch (const ParseError& e) {
      result.rejects.push_back({n, std::string(line), e.what()});
    }
  });
  check_reject_ratio(result, lines, "fast-alert lines");
  return result;
}

AlertParseResult load_snort_fast(const std::filesystem::path& path, double t0) {
  auto text = read_text_file(path);
  try {
    return parse_snort_fast(text, t0);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

AlertParseResult parse_suricata_eve(std::string_view text, double t0) {
  AlertParseResult result;
  int lines = each_line(text, [&](int n, std::string_view line) {
    try {
      auto j = json::parse(line);
      if (!j.is_object()) throw ParseError("not a JSON object");
      auto type = j.value("event_type", std::string{});
      if (type.empty()) throw ParseError("missing event_type");
      if (!j.contains("timestamp")) throw ParseError("missing timestamp");
      double t = rebase(parse_iso_timestamp(j.at("timestamp").get<std::string>()), t0);
      if (type == "alert") {
        AlertRecord a;
        a.t = t;
        a.message = j.at("alert").at("signature").get<std::string>();
        if (a.message.empty()) throw ParseError("empty signature");
        auto src = Ipv4::parse(j.at("src_ip").get<std::string>());
        auto dst = Ipv4::parse(j.at("dest_ip").get<std::string>());
        if (!src || !dst) throw ParseError("non-IPv4 address");
        a.src_addr = *src;
        a.dst_addr = *dst;
        a.protocol = j.value("proto", std::string{});
        result.alerts.push_back(std::move(a));
      } else if (type == "stats") {
        const json* capture = nullptr;
        if (j.contains("stats") && j["stats"].contains("capture"))
          capture = &j["stats"]["capture"];
        else if (j.contains("capture"))
          capture = &j["capture"];
        if (!capture) throw ParseError("stats event without capture counters");
        IdsStatsRecord s;
        s.t = t;
        s.received = capture->at("kernel_packets").get<double>();
        s.dropped = capture->at("kernel_drops").get<double>();
        s.semantics = StatsSemantics::CumulativeTotal;
        if (s.received < 0 || s.dropped < 0) throw ParseError("negative counter");
        result.stats.push_back(s);
      }
      // other event types (flow, http, ...) are ignored
    } catch (const json::exception& e) {
      result.rejects.push_back({n, std::string(line), e.what()});
    } catch (const ParseError& e) {
      result.rejects.push_back({n, std::string(line), e.what()});
    }
  });
  check_reject_ratio(result, lines, "EVE JSON lines");
  return result;
}

AlertParseResult load_suricata_eve(const std::filesystem::path& path, double t0) {
  auto text = read_text_file(path);
  try {
    return parse_suricata_eve(text, t0);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<IdsStatsRecord> parse_snort_stats(std::string_view text, double t0) {
  std::vector<IdsStatsRecord> out;
  each_line(text, [&](int n, std::string_view line) {
    if (line.front() == '#') return;
    double v[3];
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      auto [p, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v[i]);
      if (ec != std::errc{}) throw ParseError("line " + std::to_string(n) + ": expected '<t> <received_avg> <dropped_avg>'");
      pos = static_cast<std::size_t>(p - line.data());
    }
    if (!trim(line.substr(pos)).empty()) throw ParseError("line " + std::to_string(n) + ": trailing fields");
    if (v[1] < 0 || v[2] < 0) throw ParseError("line " + std::to_string(n) + ": negative rate");
    out.push_back({v[0] - t0, v[1], v[2], StatsSemantics::RuntimeAverageRate});
  });
  return out;
}

std::vector<IdsStatsRecord> load_snort_stats(const std::filesystem::path& path, double t0) {
  auto text = read_text_file(path);
  try {
    return parse_snort_stats(text, t0);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<IdsStatsRecord> to_runtime_averages(const std::vector<IdsStatsRecord>& stats) {
  std::vector<IdsStatsRecord> out;
  if (stats.empty()) return out;
  auto semantics = stats.front().semantics;
  for (auto& s : stats)
    if (s.semantics != semantics) throw ValidationError("mixed stats semantics");
  if (semantics == StatsSemantics::RuntimeAverageRate) {
    for (auto& s : stats)
      if (s.t > 0) out.push_back(s);
    return out;
  }
  const IdsStatsRecord* prev = nullptr;
  for (auto& s : stats) {
    if (prev && (s.received < prev->received || s.dropped < prev->dropped))
      throw ValidationError("cumulative counter decreased at t=" + fmt_fixed(s.t, 6) +
                            " (counter reset is not supported)");
    prev = &s;
    if (s.t <= 0) continue;
    out.push_back({s.t, s.received / s.t, s.dropped / s.t, StatsSemantics::RuntimeAverageRate});
  }
  return out;
}

std::string format_fast_alert(std::int64_t epoch_us, const std::string& message, std::uint32_t sid,
                              const std::string& protocol, Ipv4 src, std::uint16_t src_port, Ipv4 dst,
                              std::uint16_t dst_port) {
  auto days = floor_div(epoch_us, kMicrosPerDay);
  auto in_day = epoch_us - days * kMicrosPerDay;
  auto c = civil_from_days(days);
  auto secs = in_day / 1'000'000;
  char stamp[40];
  std::snprintf(stamp, sizeof stamp, "%02u/%02u-%02lld:%02lld:%02lld.%06lld", c.month, c.day,
                static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                static_cast<long long>(secs % 60), static_cast<long long>(in_day % 1'000'000));
  bool ports = protocol == "TCP" || protocol == "UDP";
  std::string line = std::string(stamp) + "  [**] [1:" + std::to_string(sid) + ":1] " + message +
                     " [**] [Priority: 2] {" + protocol + "} " + src.to_string();
  if (ports) line += ":" + std::to_string(src_port);
  line += " -> " + dst.to_string();
  if (ports) line += ":" + std::to_string(dst_port);
  return line;
}

std::string format_eve_alert(std::int64_t epoch_us, const std::string& message, std::uint32_t sid,
                             const std::string& protocol, Ipv4 src, std::uint16_t src_port, Ipv4 dst,
                             std::uint16_t dst_port) {
  json j;
  j["timestamp"] = iso_timestamp(epoch_us);
  j["event_type"] = "alert";
  j["src_ip"] = src.to_string();
  j["dest_ip"] = dst.to_string();
  if (protocol == "TCP" || protocol == "UDP") {
    j["src_port"] = src_port;
    j["dest_port"] = dst_port;
  }
  j["proto"] = protocol;
  j["alert"] = {{"action", "allowed"}, {"gid", 1}, {"signature_id", sid}, {"rev", 1},
                {"signature", message}, {"severity", 2}};
  return j.dump();
}

std::string format_eve_stats(std::int64_t epoch_us, std::uint64_t kernel_packets,
                             std::uint64_t kernel_drops, double uptime) {
  json j;
  j["timestamp"] = iso_timestamp(epoch_us);
  j["event_type"] = "stats";
  j["stats"] = {{"uptime", uptime},
                {"capture", {{"kernel_packets", kernel_packets}, {"kernel_drops", kernel_drops}}}};
  return j.dump();
}

std::string format_snort_stats(std::int64_t epoch_us, double received_avg, double dropped_avg) {
  return fmt_fixed(static_cast<double>(epoch_us) / 1e6, 6) + " " + fmt_fixed(received_avg, 6) + " " +
         fmt_fixed(dropped_avg, 6);
}

}  // namespace idsbench
