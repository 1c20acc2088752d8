#include "idsbench/mock_ids.hpp"

#include "idsbench/error.hpp"
#include "idsbench/hash.hpp"

#include <algorithm>
#include <cmath>

namespace idsbench {
namespace {

double chance(std::string_view a, std::string_view b, std::string_view salt) {
  auto h = fnv1a(salt, fnv1a("|", fnv1a(b, fnv1a("|", fnv1a(a)))));
  return unit_interval(h);
}

}  // namespace

std::string_view to_string(StatsStyle style) {
  return style == StatsStyle::SnortLike ? "snort_like" : "suricata_like";
}

std::optional<StatsStyle> parse_stats_style(std::string_view name) {
  if (name == "snort_like" || name == "snort") return StatsStyle::SnortLike;
  if (name == "suricata_like" || name == "suricata") return StatsStyle::SuricataLike;
  return std::nullopt;
}

void MockIdsConfig::validate() const {
  if (capacity_gbps <= 0) throw ValidationError("mock capacity must be > 0 Gbps");
  if (!(detection_degradation >= 0 && detection_degradation < 1))
    throw ValidationError("mock detection degradation must be in [0, 1)");
  if (!(optional_emit_fraction >= 0 && optional_emit_fraction <= 1))
    throw ValidationError("optional emit fraction must be in [0, 1]");
  if (cores < 1) throw ValidationError("mock cores must be >= 1");
  if (!(base_cpu >= 0)) throw ValidationError("mock base cpu must be >= 0");
  if (flood_alert_threshold < 1) throw ValidationError("flood threshold must be >= 1");
  if (ready_delay < 0) throw ValidationError("ready delay must be >= 0");
}

std::map<AttackType, std::vector<DetectionRule>> detection_table_from(const ExpectationProfile& profile) {
  std::map<AttackType, std::vector<DetectionRule>> table;
  for (auto& [type, entries] : profile.entries) {
    auto& rules = table[type];
    for (auto& e : entries) {
      std::string msg = e.message.text();
      if (e.message.is_wildcard()) {
        msg.pop_back();
        while (!msg.empty() && msg.back() == ' ') msg.pop_back();
      }
      rules.push_back({msg, e.priority});
    }
  }
  return table;
}

std::uint64_t IntervalTraffic::offered_packets() const {
  std::uint64_t n = background_packets;
  for (auto& a : attacks) n += a.packets;
  return n;
}

std::uint64_t IntervalTraffic::offered_bytes() const {
  std::uint64_t n = background_bytes;
  for (auto& a : attacks) n += a.bytes;
  return n;
}

MockIdsEngine::MockIdsEngine(MockIdsConfig config, double t0_epoch)
    : config_(std::move(config)), t0_us_(std::llround(t0_epoch * 1e6)) {
  config_.validate();
}

IntervalOutcome MockIdsEngine::process(const IntervalTraffic& traffic) {
  IntervalOutcome out;
  out.offered = traffic.offered_packets();
  const double offered_bits = static_cast<double>(traffic.offered_bytes()) * 8.0;
  const double capacity_bits = to_double(config_.capacity_gbps) * 1e9;
  const double analyzed_fraction = offered_bits > capacity_bits ? capacity_bits / offered_bits : 1.0;
  out.received = std::min<std::uint64_t>(
      out.offered, static_cast<std::uint64_t>(std::llround(analyzed_fraction * static_cast<double>(out.offered))));
  out.dropped = out.offered - out.received;
  out.offered_gbps = offered_bits / 1e9;
  out.analyzed_gbps = out.offered_gbps * analyzed_fraction;
  total_received_ += out.received;
  total_dropped_ += out.dropped;

  for (auto& attack : traffic.attacks) {
    observed_.insert(attack.source);
    bool analyzed = analyzed_fraction >= 1.0 ||
                    chance(attack.trace_id, attack.source.to_string(), "analyzed") < analyzed_fraction;
    if (analyzed) {
      analyzed_.push_back(attack.trace_id);
      detect(attack);
    } else {
      dropped_traces_.push_back(attack.trace_id);
    }
  }

  const double t = static_cast<double>(traffic.index + 1);
  const std::int64_t epoch_us = t0_us_ + (traffic.index + 1) * 1'000'000;
  cumulative_.push_back({t, static_cast<double>(total_received_), static_cast<double>(total_dropped_),
                         StatsSemantics::CumulativeTotal});
  if (config_.stats_style == StatsStyle::SuricataLike) {
    stats_lines_.push_back(format_eve_stats(epoch_us, total_received_, total_dropped_, t));
  } else {
    stats_lines_.push_back(format_snort_stats(epoch_us, static_cast<double>(total_received_) / t,
                                              static_cast<double>(total_dropped_) / t));
  }

  const double capacity = to_double(config_.capacity_gbps);
  MonitorSample& s = out.ids_sample;
  s.t = t;
  s.cpu_per_core.assign(static_cast<std::size_t>(config_.cores), 0.0);
  if (config_.stats_style == StatsStyle::SnortLike) {
    // single packet thread; load follows what is offered
    s.cpu_per_core[0] = std::min(1.0, out.offered_gbps / capacity * config_.base_cpu);
  } else {
    std::fill(s.cpu_per_core.begin(), s.cpu_per_core.end(),
              std::min(1.0, out.analyzed_gbps / capacity * config_.base_cpu));
  }
  s.memory = static_cast<double>(config_.memory_footprint);
  s.bytes_in = static_cast<double>(traffic.offered_bytes());
  s.bytes_out = 0;
  s.packets_in = static_cast<double>(out.offered);
  s.packets_out = 0;
  monitor_lines_.push_back(format_monitor_line(static_cast<double>(epoch_us) / 1e6, s));
  return out;
}

void MockIdsEngine::detect(const OfferedAttack& attack) {
  auto it = config_.detection_table.find(attack.type);
  if (it == config_.detection_table.end()) return;
  const double suppress = std::min(
      1.0, config_.detection_degradation * std::max(0, attack.concurrent - config_.degradation_knee));
  const bool flood_below_threshold =
      is_flood(attack.type) && attack.packets < static_cast<std::uint64_t>(config_.flood_alert_threshold);
  const std::int64_t base_us = t0_us_ + std::llround((attack.start + attack.duration) * 1e6);
  int emitted = 0;
  for (auto& rule : it->second) {
    if (rule.priority == Priority::Required) {
      if (flood_below_threshold) continue;
      if (chance(attack.trace_id, rule.message, "degrade") < suppress) continue;
    } else if (chance(attack.trace_id, rule.message, "optional") >= config_.optional_emit_fraction) {
      continue;
    }
    std::string logged = rule.message;
    if (auto cls = config_.aliases.classes().find(rule.message);
        cls != config_.aliases.classes().end() && !cls->second.empty()) {
      auto pick = fnv1a(attack.trace_id, fnv1a(rule.message)) % cls->second.size();
      logged = cls->second[pick];
    }
    const std::int64_t epoch_us = base_us + 1000LL * emitted++;
    const auto sid = static_cast<std::uint32_t>(2'000'000 + fnv1a(logged) % 1'000'000);
    if (config_.stats_style == StatsStyle::SnortLike) {
      alert_lines_.push_back(format_fast_alert(epoch_us, logged, sid, attack.protocol, attack.source,
                                               attack.src_port, attack.target, attack.dst_port));
    } else {
      alert_lines_.push_back(format_eve_alert(epoch_us, logged, sid, attack.protocol, attack.source,
                                              attack.src_port, attack.target, attack.dst_port));
    }
    alerts_.push_back({static_cast<double>(epoch_us - t0_us_) / 1e6, logged, attack.source,
                       attack.target, attack.protocol});
  }
}

MockIdsOutput mock_ids_run(const MockIdsConfig& config, const std::vector<IntervalTraffic>& offered,
                           double t0_epoch) {
  MockIdsEngine engine(config, t0_epoch);
  MockIdsOutput out;
  for (auto& interval : offered) out.intervals.push_back(engine.process(interval));
  auto join = [](const std::vector<std::string>& lines) {
    std::string s;
    for (auto& l : lines) s += l + '\n';
    return s;
  };
  out.alert_log = join(engine.alert_lines());
  out.stats_log = join(engine.stats_lines());
  out.monitor_log = join(engine.monitor_lines());
  return out;
}

}  // namespace idsbench
