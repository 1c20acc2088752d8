#include "idsbench/matcher.hpp"

#include "idsbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace idsbench {

std::vector<Expectation> expand_expectations(const AttackPlan& plan, const ExpectationProfile& profile,
                                             const MessageMapping& mapping) {
  std::vector<Expectation> out;
  for (auto& [minute, attacks] : plan.schedule) {
    for (auto& a : attacks) {
      auto it = profile.entries.find(a.type);
      if (it == profile.entries.end() || it->second.empty())
        throw ValidationError("no expected messages for attack type " + std::string(to_string(a.type)));
      for (auto& e : it->second) {
        std::string msg = e.message.is_wildcard() ? e.message.text() : mapping.canonicalize(e.message.text());
        out.push_back({minute, a, std::move(msg), e.priority, 1});
      }
    }
  }
  return out;
}

std::int64_t MatchTable::logged_total() const {
  std::int64_t n = 0;
  for (auto& [k, r] : rows) n += r.logged;
  return n;
}

MatchTable attribute(const std::vector<AlertRecord>& alerts, const AttackPlan& plan, const MessageMapping& mapping) {
  MatchTable table;
  for (auto& alert : alerts) {
    auto hit = plan.find_source(alert.src_addr);
    const int alert_minute = static_cast<int>(std::floor(alert.t / 60.0));
    if (!hit || std::abs(alert_minute - hit->first) > 1) {
      table.unattributed.push_back(alert);
      continue;
    }
    auto& row = table.rows[{hit->first, mapping.canonicalize(alert.message)}];
    ++row.logged;
    if (alert_minute > hit->first) row.flags |= rowflag::kLate;
    if (alert_minute < hit->first) row.flags |= rowflag::kEarly;
  }
  return table;
}

MatchTable apply_expectations(const MatchTable& attributed, const std::vector<Expectation>& expectations) {
  MatchTable out;
  out.unattributed = attributed.unattributed;
  // patterns per minute in first-seen order; exact patterns win over wildcards
  std::map<int, std::vector<MessagePattern>> patterns;
  for (auto& e : expectations) {
    auto& row = out.rows[{e.minute, e.message}];
    (e.priority == Priority::Required ? row.expected_required : row.expected_optional) += e.expected_count;
    auto& list = patterns[e.minute];
    MessagePattern p(e.message);
    if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(std::move(p));
  }
  for (auto& [minute, list] : patterns)
    std::stable_partition(list.begin(), list.end(), [](const MessagePattern& p) { return !p.is_wildcard(); });

  for (auto& [key, row] : attributed.rows) {
    std::string target = key.message;
    if (auto it = patterns.find(key.minute); it != patterns.end()) {
      for (auto& p : it->second) {
        if (p.matches(key.message)) {
          target = p.text();
          break;
        }
      }
    }
    auto& dst = out.rows[{key.minute, target}];
    dst.logged += row.logged;
    dst.flags |= row.flags;
  }
  return out;
}

DetectionCounts count_matches(const MatchTable& table, const std::vector<Expectation>& expectations) {
  const MatchTable merged = apply_expectations(table, expectations);
  DetectionCounts c;
  for (auto& [key, row] : merged.rows) {
    c.tp += std::min(row.logged, row.expected_required);
    c.fn += std::max<std::int64_t>(0, row.expected_required - row.logged);
    c.fp += std::max<std::int64_t>(0, row.logged - row.expected());
  }
  c.fp += static_cast<std::int64_t>(merged.unattributed.size());
  return c;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string to_csv(const MatchTable& table) {
  std::string out = "minute,message,logged,expected,priority,flags\n";
  for (auto& [key, row] : table.rows) {
    std::string priority = row.expected_required > 0 ? "0" : row.expected_optional > 0 ? "1" : "";
    std::string flags;
    if (row.flags & rowflag::kLate) flags = "late";
    if (row.flags & rowflag::kEarly) flags += flags.empty() ? "early" : ";early";
    out += std::to_string(key.minute) + ',' + csv_field(key.message) + ',' + std::to_string(row.logged) + ',' +
           std::to_string(row.expected()) + ',' + priority + ',' + flags + '\n';
  }
  return out;
}

std::string unattributed_csv(const MatchTable& table) {
  std::string out = "t,message,src,dst\n";
  char buf[64];
  for (auto& a : table.unattributed) {
    std::snprintf(buf, sizeof buf, "%.6f", a.t);
    out += std::string(buf) + ',' + csv_field(a.message) + ',' + a.src_addr.to_string() + ',' + a.dst_addr.to_string() +
           '\n';
  }
  return out;
}

}  // namespace idsbench
