#include "idsbench/error.hpp"
#include "idsbench/matcher.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace idsbench;

namespace {

AttackPlan one_attack(AttackType type, Ipv4 src = Ipv4{10, 9, 0, 5}, int minute = 0, int minutes = 1) {
  AttackPlan p;
  p.params.duration_minutes = minutes;
  p.schedule[minute].push_back({type, "t0", src});
  return p;
}

AlertRecord alert(double t, std::string msg, Ipv4 src = Ipv4{10, 9, 0, 5}) {
  return {t, std::move(msg), src, Ipv4{10, 0, 1, 2}, "TCP"};
}

const ExpectationProfile& profile() {
  static const auto p = parse_priorities(default_priorities_text());
  return p;
}

const MessageMapping& mapping() {
  static const auto m = parse_mapping(default_mapping_text());
  return m;
}

DetectionCounts run(const AttackPlan& plan, const std::vector<AlertRecord>& alerts,
                    const MessageMapping& map = mapping()) {
  auto ex = expand_expectations(plan, profile(), map);
  return count_matches(attribute(alerts, plan, map), ex);
}

}  // namespace

TEST(Expand, SshExampleAndCounting) {
  auto ex = expand_expectations(one_attack(AttackType::SshBruteForceFailure), profile(), mapping());
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].priority, Priority::Required);
  EXPECT_EQ(ex[1].priority, Priority::Optional);
  EXPECT_TRUE(expand_expectations(AttackPlan{}, profile(), mapping()).empty());

  AttackPlan ten;
  ten.params.duration_minutes = 1;
  for (std::uint32_t i = 0; i < 10; ++i)
    ten.schedule[0].push_back({AttackType::SynScan, "s" + std::to_string(i), Ipv4(Ipv4{10, 9, 0, 1}.value() + i)});
  EXPECT_EQ(expand_expectations(ten, profile(), mapping()).size(), 10u);

  auto partial = parse_priorities("syn_scan | 0 | TCPScan\n");
  EXPECT_THROW(expand_expectations(one_attack(AttackType::UdpScan), partial, mapping()), ValidationError);
}

TEST(Attribute, Examples) {
  auto plan = one_attack(AttackType::SynScan);
  auto t = attribute({alert(30, "TCPScan")}, plan, mapping());
  EXPECT_EQ(t.rows.at({0, "TCPScan"}).logged, 1);

  auto mapped = attribute({alert(30, "TCPFilteredScan")}, plan, mapping());
  EXPECT_EQ(mapped.rows.at({0, "TCPScan"}).logged, 1);
  EXPECT_EQ(mapped.rows.count({0, "TCPFilteredScan"}), 0u);

  auto stranger = attribute({alert(30, "TCPScan", Ipv4{172, 16, 0, 1})}, plan, mapping());
  EXPECT_TRUE(stranger.rows.empty());
  EXPECT_EQ(stranger.unattributed.size(), 1u);
}

TEST(Attribute, AdjacentMinuteFlaggedAndFartherRejected) {
  auto plan = one_attack(AttackType::SynScan, Ipv4{10, 9, 0, 5}, 1, 4);
  auto t = attribute({alert(125, "TCPScan"), alert(59, "TCPScan"), alert(185, "TCPScan")}, plan, mapping());
  auto& row = t.rows.at({1, "TCPScan"});
  EXPECT_EQ(row.logged, 2);
  EXPECT_EQ(row.flags, rowflag::kLate | rowflag::kEarly);
  EXPECT_EQ(t.unattributed.size(), 1u);
  auto csv = to_csv(apply_expectations(t, expand_expectations(plan, profile(), mapping())));
  EXPECT_NE(csv.find("1,TCPScan,2,1,0,late;early"), std::string::npos) << csv;
}

TEST(Count, Examples) {
  auto plan = one_attack(AttackType::SynScan);
  EXPECT_EQ(run(plan, {alert(1, "TCPScan")}), (DetectionCounts{1, 0, 0}));
  // optional NetSSH message absent: no fn
  auto ssh = one_attack(AttackType::SshBruteForceFailure);
  EXPECT_EQ(run(ssh, {alert(1, "ET SCAN Potential SSH Scan")}), (DetectionCounts{1, 0, 0}));
  // optional present: neither tp nor fp
  EXPECT_EQ(run(ssh, {alert(1, "ET SCAN Potential SSH Scan"),
                      alert(2, "ET INFO NetSSH SSH Version String Hardcoded in Metasploit")}),
            (DetectionCounts{1, 0, 0}));
  // required missing plus a stranger
  EXPECT_EQ(run(plan, {alert(1, "TCPScan", Ipv4{172, 16, 0, 1})}), (DetectionCounts{0, 1, 1}));
  // redundant pair both firing: surplus is fp
  EXPECT_EQ(run(plan, {alert(1, "TCPScan"), alert(2, "TCPFilteredScan")}), (DetectionCounts{1, 1, 0}));
  // wildcard pattern
  auto enumeration = one_attack(AttackType::UserEnumeration);
  EXPECT_EQ(run(enumeration, {alert(1, "ET SCAN Possible SSH User Enumeration Attempt")}),
            (DetectionCounts{1, 0, 0}));
}

TEST(Count, UnexpectedMessageFromPlannedSourceIsFp) {
  EXPECT_EQ(run(one_attack(AttackType::SynScan), {alert(1, "TCPScan"), alert(2, "UDPScan")}),
            (DetectionCounts{1, 1, 0}));
}

TEST(Csv, QuotingAndUnattributed) {
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
  EXPECT_EQ(csv_field("plain"), "plain");
  MatchTable t;
  t.unattributed.push_back(alert(1.5, "m,1", Ipv4{1, 2, 3, 4}));
  EXPECT_EQ(unattributed_csv(t), "t,message,src,dst\n1.500000,\"m,1\",1.2.3.4,10.0.1.2\n");
}

TEST(MatcherProperty, ConservationAndInvariants) {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 300; ++round) {
    auto inst = fixtures::random_match_instance(rng, profile(), mapping());
    auto table = attribute(inst.alerts, inst.plan, mapping());
    EXPECT_EQ(table.logged_total() + static_cast<std::int64_t>(table.unattributed.size()),
              static_cast<std::int64_t>(inst.alerts.size()));
    auto ex = expand_expectations(inst.plan, profile(), mapping());
    auto merged = apply_expectations(table, ex);
    EXPECT_EQ(merged.logged_total(), table.logged_total());
    auto c = count_matches(table, ex);
    std::int64_t required = 0;
    for (auto& e : ex) required += e.priority == Priority::Required ? e.expected_count : 0;
    EXPECT_EQ(c.tp + c.fn, required);
    EXPECT_GE(c.fp, static_cast<std::int64_t>(table.unattributed.size()));
  }
}

TEST(MatcherProperty, Monotonicity) {
  std::mt19937_64 rng(202);
  for (int round = 0; round < 200; ++round) {
    auto inst = fixtures::random_match_instance(rng, profile(), mapping());
    auto ex = expand_expectations(inst.plan, profile(), mapping());
    auto base = count_matches(attribute(inst.alerts, inst.plan, mapping()), ex);
    auto extra = fixtures::random_match_instance(rng, profile(), mapping());
    if (!extra.alerts.empty()) {
      auto more = inst.alerts;
      more.push_back(extra.alerts.front());
      auto c = count_matches(attribute(more, inst.plan, mapping()), ex);
      EXPECT_GE(c.tp + c.fp, base.tp + base.fp);
    }
    auto ex_more = ex;
    ex_more.push_back({0, inst.plan.schedule.begin()->second.front(), "TCPScan",
                       rng() % 2 ? Priority::Required : Priority::Optional, 1});
    auto c2 = count_matches(attribute(inst.alerts, inst.plan, mapping()), ex_more);
    EXPECT_GE(c2.tp + c2.fn, base.tp + base.fn);
  }
}

TEST(MatcherProperty, MappingSoundness) {
  std::mt19937_64 rng(303);
  MessageMapping identity;
  for (int round = 0; round < 200; ++round) {
    auto inst = fixtures::random_match_instance(rng, profile(), mapping());
    auto ex = expand_expectations(inst.plan, profile(), mapping());
    auto with_map = count_matches(attribute(inst.alerts, inst.plan, mapping()), ex);
    auto pre = inst.alerts;
    for (auto& a : pre) a.message = canonicalize(mapping(), a.message);
    auto pre_identity = count_matches(attribute(pre, inst.plan, identity), ex);
    EXPECT_EQ(with_map, pre_identity);
  }
}

TEST(MatcherProperty, AgreesWithGreedyOracle) {
  std::mt19937_64 rng(404);
  auto oprof = fixtures::oracle_profile(profile());
  auto aliases = fixtures::alias_map(mapping());
  for (int round = 0; round < 500; ++round) {
    auto inst = fixtures::random_match_instance(rng, profile(), mapping());
    auto got = run(inst.plan, inst.alerts);
    auto want = oracle::greedy_match(inst.alerts, inst.plan, aliases, oprof);
    EXPECT_EQ(got.tp, want.tp) << round;
    EXPECT_EQ(got.fp, want.fp) << round;
    EXPECT_EQ(got.fn, want.fn) << round;
  }
}
