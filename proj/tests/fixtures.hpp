#pragma once
// Random inputs shared by the property tests and the acceptance binary.

#include "idsbench/adapters.hpp"
#include "idsbench/plan.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

struct MatchInstance {
  idsbench::AttackPlan plan;
  std::vector<idsbench::AlertRecord> alerts;
};

/// Plan with at most max_minutes minutes and max_attacks attacks, plus up to max_alerts alerts
/// whose messages come from the profile, the mapping aliases or noise, and whose sources are
/// mostly planned ones (some strangers), timed around the planned minute.
inline MatchInstance random_match_instance(std::mt19937_64& rng, const idsbench::ExpectationProfile& profile,
                                           const idsbench::MessageMapping& mapping, int max_minutes = 5,
                                           int max_attacks = 6, int max_alerts = 30) {
  using namespace idsbench;
  MatchInstance inst;
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  int minutes = 1 + static_cast<int>(pick(static_cast<std::size_t>(max_minutes)));
  int attacks = 1 + static_cast<int>(pick(static_cast<std::size_t>(max_attacks)));
  inst.plan.params.duration_minutes = minutes;
  inst.plan.params.attacks_per_minute = attacks;
  std::vector<std::pair<int, AttackInstance>> placed;
  for (int i = 0; i < attacks; ++i) {
    int m = static_cast<int>(pick(static_cast<std::size_t>(minutes)));
    AttackInstance a{kAllAttackTypes[pick(kAllAttackTypes.size())], "tr" + std::to_string(i),
                     Ipv4(Ipv4{10, 9, 0, 1}.value() + static_cast<std::uint32_t>(i))};
    inst.plan.schedule[m].push_back(a);
    placed.push_back({m, a});
  }
  std::vector<std::string> pool;
  for (auto& [type, entries] : profile.entries)
    for (auto& e : entries) {
      std::string text = e.message.text();
      if (e.message.is_wildcard()) {
        text.pop_back();
        pool.push_back(text + " Attempt");
      }
      pool.push_back(text);
    }
  for (auto& [canonical, members] : mapping.classes())
    for (auto& m : members) pool.push_back(m);
  pool.push_back("GPL ICMP_INFO PING");
  pool.push_back("ET POLICY Unrelated");
  int n_alerts = static_cast<int>(pick(static_cast<std::size_t>(max_alerts) + 1));
  for (int i = 0; i < n_alerts; ++i) {
    AlertRecord a;
    a.message = pool[pick(pool.size())];
    a.dst_addr = Ipv4{10, 0, 1, 2};
    a.protocol = "TCP";
    if (pick(6) == 0) {
      a.src_addr = Ipv4{172, 16, 0, static_cast<std::uint8_t>(1 + pick(50))};
      a.t = static_cast<double>(pick(static_cast<std::size_t>(minutes) * 60000)) / 1000.0;
    } else {
      auto& [m, inst_a] = placed[pick(placed.size())];
      a.src_addr = inst_a.source;
      // mostly inside the minute, sometimes one or two minutes off
      int shift = pick(5) == 0 ? static_cast<int>(pick(5)) - 2 : 0;
      double t = (m + shift) * 60.0 + static_cast<double>(pick(60000)) / 1000.0;
      a.t = t < 0 ? 0 : t;
    }
    inst.alerts.push_back(a);
  }
  return inst;
}

/// Profile in the shape the test oracles take.
inline std::map<idsbench::AttackType, std::vector<std::pair<std::string, bool>>> oracle_profile(
    const idsbench::ExpectationProfile& profile) {
  std::map<idsbench::AttackType, std::vector<std::pair<std::string, bool>>> out;
  for (auto t : idsbench::kAllAttackTypes) out[t];
  for (auto& [type, entries] : profile.entries)
    for (auto& e : entries) out[type].push_back({e.message.text(), e.priority == idsbench::Priority::Required});
  return out;
}

inline std::map<std::string, std::string> alias_map(const idsbench::MessageMapping& mapping) {
  std::map<std::string, std::string> out;
  for (auto& [canonical, members] : mapping.classes())
    for (auto& m : members) out[m] = canonical;
  return out;
}

}  // namespace fixtures
