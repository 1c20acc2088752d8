#include "idsbench/adapters.hpp"
#include "idsbench/error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace idsbench;

namespace {

// 2017-08-28T12:13:00Z
constexpr double kT0 = 1503922380.0;

const char* kFastLine =
    "08/28-12:13:14.123456 [**] [1:100:1] ET SCAN Potential SSH Scan [**] [Priority: 2] {TCP} "
    "10.9.0.5:4444 -> 10.0.1.2:22";

}  // namespace

TEST(FastAlert, ExampleLine) {
  auto r = parse_snort_fast(kFastLine, kT0);
  ASSERT_EQ(r.alerts.size(), 1u);
  EXPECT_TRUE(r.rejects.empty());
  auto& a = r.alerts[0];
  EXPECT_EQ(a.message, "ET SCAN Potential SSH Scan");
  EXPECT_EQ(a.src_addr, (Ipv4{10, 9, 0, 5}));
  EXPECT_EQ(a.dst_addr, (Ipv4{10, 0, 1, 2}));
  EXPECT_EQ(a.protocol, "TCP");
  EXPECT_NEAR(a.t, 14.123456, 1e-9);
}

TEST(FastAlert, EmptyFileAndPortlessIcmp) {
  EXPECT_TRUE(parse_snort_fast("", kT0).alerts.empty());
  auto r = parse_snort_fast(
      "08/28-12:13:20.000000 [**] [1:2:3] GPL ICMP_INFO PING *NIX [**] [Priority: 3] {ICMP} 10.9.0.7 -> 10.0.1.2",
      kT0);
  ASSERT_EQ(r.alerts.size(), 1u);
  EXPECT_EQ(r.alerts[0].protocol, "ICMP");
}

TEST(FastAlert, ThreeMalformedOfHundred) {
  std::string text;
  for (int i = 0; i < 100; ++i) {
    if (i == 10 || i == 50 || i == 99) text += "garbage line " + std::to_string(i) + "\n";
    else text += std::string(kFastLine) + "\n";
  }
  auto r = parse_snort_fast(text, kT0);
  EXPECT_EQ(r.alerts.size(), 97u);
  ASSERT_EQ(r.rejects.size(), 3u);
  EXPECT_EQ(r.rejects[0].line, 11);
  EXPECT_EQ(r.rejects[2].line, 100);
}

TEST(FastAlert, TooManyMalformedIsHardError) {
  std::string text;
  for (int i = 0; i < 10; ++i) text += (i < 2 ? std::string("junk") : std::string(kFastLine)) + "\n";
  EXPECT_THROW(parse_snort_fast(text, kT0), ParseError);
  EXPECT_THROW(load_snort_fast("/nonexistent/alerts.log", kT0), std::exception);
}

TEST(Eve, AlertAndStats) {
  std::string text =
      R"({"timestamp":"2017-08-28T12:13:05.500000+0000","event_type":"alert","src_ip":"10.9.0.5","src_port":1,"dest_ip":"10.0.1.2","dest_port":22,"proto":"TCP","alert":{"signature":"ET SCAN Potential SSH Scan","signature_id":1}})"
      "\n"
      R"({"timestamp":"2017-08-28T12:13:10+0000","event_type":"stats","stats":{"capture":{"kernel_packets":1000,"kernel_drops":0}}})"
      "\n"
      R"({"timestamp":"2017-08-28T12:13:20Z","event_type":"stats","stats":{"capture":{"kernel_packets":3000,"kernel_drops":500}}})"
      "\n";
  auto r = parse_suricata_eve(text, kT0);
  ASSERT_EQ(r.alerts.size(), 1u);
  EXPECT_EQ(r.alerts[0].message, "ET SCAN Potential SSH Scan");
  EXPECT_DOUBLE_EQ(r.alerts[0].t, 5.5);
  ASSERT_EQ(r.stats.size(), 2u);
  EXPECT_EQ(r.stats[0], (IdsStatsRecord{10, 1000, 0, StatsSemantics::CumulativeTotal}));
  EXPECT_EQ(r.stats[1], (IdsStatsRecord{20, 3000, 500, StatsSemantics::CumulativeTotal}));
}

TEST(Eve, OnlyStats) {
  auto r = parse_suricata_eve(format_eve_stats(static_cast<std::int64_t>(kT0 * 1e6) + 1'000'000, 7, 1, 1), kT0);
  EXPECT_TRUE(r.alerts.empty());
  ASSERT_EQ(r.stats.size(), 1u);
  EXPECT_EQ(r.stats[0].received, 7);
}

TEST(Eve, OtherEventTypesIgnored) {
  auto r = parse_suricata_eve(R"({"timestamp":"2017-08-28T12:13:05Z","event_type":"flow"})", kT0);
  EXPECT_TRUE(r.alerts.empty());
  EXPECT_TRUE(r.stats.empty());
  EXPECT_TRUE(r.rejects.empty());
}

TEST(SnortStats, ParsesAverages) {
  auto s = parse_snort_stats("1503922390 100 5\n", kT0);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (IdsStatsRecord{10, 100, 5, StatsSemantics::RuntimeAverageRate}));
  EXPECT_THROW(parse_snort_stats("1 2\n", 0), ParseError);
}

TEST(RuntimeAverages, Examples) {
  auto out = to_runtime_averages({{0, 0, 0, StatsSemantics::CumulativeTotal},
                                  {10, 1000, 20, StatsSemantics::CumulativeTotal}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (IdsStatsRecord{10, 100, 2, StatsSemantics::RuntimeAverageRate}));
  std::vector<IdsStatsRecord> avg = {{1, 5, 1, StatsSemantics::RuntimeAverageRate},
                                     {2, 7, 0, StatsSemantics::RuntimeAverageRate}};
  EXPECT_EQ(to_runtime_averages(avg), avg);
  EXPECT_THROW(to_runtime_averages({{1, 10, 0, StatsSemantics::CumulativeTotal},
                                    {2, 5, 0, StatsSemantics::CumulativeTotal}}),
               ValidationError);
  EXPECT_THROW(to_runtime_averages({{1, 10, 0, StatsSemantics::CumulativeTotal},
                                    {2, 5, 0, StatsSemantics::RuntimeAverageRate}}),
               ValidationError);
}

TEST(RuntimeAveragesProperty, ScaleInvariantUnderTimeUnit) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 30; ++round) {
    std::vector<IdsStatsRecord> sec, ms;
    double rx = 0, dr = 0;
    for (int i = 1; i <= 20; ++i) {
      rx += static_cast<double>(rng() % 1000);
      dr += static_cast<double>(rng() % 10);
      sec.push_back({static_cast<double>(i), rx, dr, StatsSemantics::CumulativeTotal});
      ms.push_back({i * 1000.0, rx, dr, StatsSemantics::CumulativeTotal});
    }
    auto a = to_runtime_averages(sec);
    auto b = to_runtime_averages(ms);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_DOUBLE_EQ(a[i].received, b[i].received * 1000);
      EXPECT_DOUBLE_EQ(a[i].dropped, b[i].dropped * 1000);
    }
  }
}

TEST(Timestamps, FastAndIso) {
  EXPECT_EQ(parse_fast_timestamp("08/28-12:13:14.123456", 2017), 1503922394123456);
  EXPECT_EQ(parse_iso_timestamp("2017-08-28T12:13:14.123456+0000"), 1503922394123456);
  EXPECT_EQ(parse_iso_timestamp("2017-08-28T14:13:14.123456+0200"), 1503922394123456);
  EXPECT_EQ(parse_iso_timestamp("2017-08-28T12:13:14Z"), 1503922394000000);
  EXPECT_THROW(parse_fast_timestamp("13/28-12:13:14.1", 2017), ParseError);
  EXPECT_THROW(parse_iso_timestamp("2017-08-28 junk"), ParseError);
}

TEST(EmitParseProperty, FastAndEveRoundTrip) {
  std::mt19937_64 rng(23);
  const std::vector<std::string> msgs = {"ET SCAN Potential SSH Scan", "TCPScan", "a [b] c", "x"};
  const std::vector<std::string> protos = {"TCP", "UDP", "ICMP"};
  for (int i = 0; i < 200; ++i) {
    std::int64_t us = static_cast<std::int64_t>(kT0 * 1e6) + static_cast<std::int64_t>(rng() % 3'600'000'000ULL);
    auto msg = msgs[rng() % msgs.size()];
    auto proto = protos[rng() % protos.size()];
    Ipv4 src(static_cast<std::uint32_t>(rng())), dst(static_cast<std::uint32_t>(rng()));
    AlertRecord expect{static_cast<double>(us - static_cast<std::int64_t>(kT0 * 1e6)) / 1e6, msg, src, dst, proto};
    auto f = parse_snort_fast(format_fast_alert(us, msg, 7, proto, src, 1, dst, 2), kT0);
    ASSERT_EQ(f.alerts.size(), 1u) << format_fast_alert(us, msg, 7, proto, src, 1, dst, 2);
    EXPECT_EQ(f.alerts[0], expect);
    auto e = parse_suricata_eve(format_eve_alert(us, msg, 7, proto, src, 1, dst, 2), kT0);
    ASSERT_EQ(e.alerts.size(), 1u);
    EXPECT_EQ(e.alerts[0], expect);
  }
}
