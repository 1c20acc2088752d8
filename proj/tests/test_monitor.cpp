#include "idsbench/error.hpp"
#include "idsbench/monitor.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace idsbench;

namespace {

std::string lines(const std::vector<std::pair<double, double>>& rows) {
  std::string s;
  char buf[96];
  for (auto [t, v] : rows) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", t, v);
    s += buf;
  }
  return s;
}

BandwidthSeries flat(Role role, double start, std::size_t n, double v) {
  BandwidthSeries s;
  s.start = start;
  s.source_role = role;
  s.values.assign(n, v);
  return s;
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST(Normalize, UnitExamples) {
  auto k = normalize_bandwidth("0 1000000\n", BandwidthUnit::KbitPerSec, 1, Role::Sender);
  EXPECT_EQ(k.values.at(0), 1.0);
  auto b = normalize_bandwidth("0 125000000\n", BandwidthUnit::BytePerSec, 1, Role::Sender);
  EXPECT_EQ(b.values.at(0), 1.0);
  auto m = normalize_bandwidth("0 2500\n1 0\n", BandwidthUnit::MbitPerSec, 1, Role::Ids);
  EXPECT_EQ(m.values, (std::vector<double>{2.5, 0.0}));
  EXPECT_EQ(parse_bandwidth_unit("Kbit/s"), BandwidthUnit::KbitPerSec);
  EXPECT_FALSE(parse_bandwidth_unit("furlong/s"));
}

TEST(Normalize, ErrorsOnBadInput) {
  EXPECT_THROW(normalize_bandwidth("1 5\n0 5\n", BandwidthUnit::GbitPerSec, 1, Role::Sender), ValidationError);
  EXPECT_THROW(normalize_bandwidth("1 -5\n", BandwidthUnit::GbitPerSec, 1, Role::Sender), ValidationError);
  EXPECT_THROW(normalize_bandwidth("1 x\n", BandwidthUnit::GbitPerSec, 1, Role::Sender), ParseError);
  EXPECT_THROW(normalize_bandwidth("1 2 3\n", BandwidthUnit::GbitPerSec, 1, Role::Sender), ParseError);
}

TEST(NormalizeProperty, MixedUnitEncodingsAgree) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> kbit(0, 10'000'000);
  for (int round = 0; round < 20; ++round) {
    // ground truth in whole Kbit/s so every encoding below is an exact decimal
    std::vector<std::int64_t> truth(30);
    for (auto& v : truth) v = kbit(rng);
    std::vector<std::pair<double, double>> as_bit, as_kbit, as_mbit, as_byte;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      double t = static_cast<double>(i);
      as_bit.push_back({t, static_cast<double>(truth[i]) * 1000});
      as_kbit.push_back({t, static_cast<double>(truth[i])});
      as_mbit.push_back({t, static_cast<double>(truth[i]) / 1000});
      as_byte.push_back({t, static_cast<double>(truth[i]) * 125});
    }
    auto a = normalize_bandwidth(lines(as_bit), BandwidthUnit::BitPerSec, 1, Role::Sender);
    auto b = normalize_bandwidth(lines(as_kbit), BandwidthUnit::KbitPerSec, 1, Role::Sender);
    auto c = normalize_bandwidth(lines(as_mbit), BandwidthUnit::MbitPerSec, 1, Role::Sender);
    auto d = normalize_bandwidth(lines(as_byte), BandwidthUnit::BytePerSec, 1, Role::Sender);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      double expect = static_cast<double>(truth[i]) / 1e6;
      EXPECT_TRUE(close_rel(a.values[i], expect));
      EXPECT_TRUE(close_rel(b.values[i], expect));
      EXPECT_TRUE(close_rel(c.values[i], expect));
      EXPECT_TRUE(close_rel(d.values[i], expect));
    }
  }
}

TEST(Align, FullColumnsAndLateStart) {
  auto table = align_and_merge({flat(Role::Sender, 0, 60, 1), flat(Role::Receiver, 30, 30, 2)}, {0, 60});
  ASSERT_EQ(table.t.size(), 60u);
  ASSERT_TRUE(table.sender && table.receiver);
  EXPECT_FALSE(table.ids.has_value());
  for (std::size_t r = 0; r < 60; ++r) {
    EXPECT_EQ(table.sender->at(r), 1.0);
    if (r < 30) EXPECT_FALSE(table.receiver->at(r).has_value());
    else EXPECT_EQ(table.receiver->at(r), 2.0);
  }
  auto csv = to_csv(table);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,sender_gbps,receiver_gbps,ids_gbps");
}

TEST(Align, OutsideWindowNamesRole) {
  try {
    align_and_merge({flat(Role::Sender, 0, 60, 1), flat(Role::Receiver, 200, 60, 1)}, {0, 60});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("receiver"), std::string::npos);
  }
  EXPECT_THROW(align_and_merge({flat(Role::Ids, 0, 5, 1), flat(Role::Ids, 0, 5, 1)}, {0, 5}), ValidationError);
}

TEST(AlignProperty, OrderIndependent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0, 10);
  for (int round = 0; round < 25; ++round) {
    std::vector<BandwidthSeries> series;
    for (Role r : {Role::Sender, Role::Receiver, Role::Ids}) {
      auto s = flat(r, static_cast<double>(rng() % 20) - 10, 40 + rng() % 20, 0);
      for (auto& v : s.values) v = val(rng);
      series.push_back(s);
    }
    auto base = align_and_merge(series, {0, 45});
    std::shuffle(series.begin(), series.end(), rng);
    EXPECT_EQ(align_and_merge(series, {0, 45}), base);
  }
}

TEST(MonitorLog, ParsesAndFormats) {
  auto samples = parse_monitor_log("1000.5 CPU 0.5 0.25 | MEM 6000000 | NET 10 20 | PKT 1 2\n", 1000);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].t, 0.5);
  EXPECT_EQ(samples[0].cpu_per_core, (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(samples[0].packets_out, 2.0);
  auto line = format_monitor_line(1000.5, samples[0]);
  EXPECT_EQ(parse_monitor_log(line, 1000), samples);
  EXPECT_THROW(parse_monitor_log("1 CPU 1.5 | MEM 1 | NET 1 1\n", 0), ParseError);
  EXPECT_THROW(parse_monitor_log("1 CPU 0.5 | NET 1 1\n", 0), ParseError);
  EXPECT_THROW(parse_monitor_log("2 CPU 0.5 | MEM 1 | NET 1 1\n1 CPU 0.5 | MEM 1 | NET 1 1\n", 0), ParseError);
}

TEST(Resources, ConstantAndFootprintExamples) {
  std::vector<MonitorSample> s;
  for (int i = 1; i <= 10; ++i) s.push_back({static_cast<double>(i), {0.5, 0.5, 0.5, 0.5}, 6e6, 0, 0, {}, {}});
  auto r = summarize_resources(s);
  EXPECT_DOUBLE_EQ(r.cpu_avg, 0.5);
  EXPECT_DOUBLE_EQ(r.memory_avg, 6e6);
  EXPECT_THROW(summarize_resources({}), ValidationError);
}

TEST(Resources, RampMeanAndWindow) {
  const int n = 101;
  std::vector<MonitorSample> s;
  for (int i = 0; i < n; ++i) s.push_back({static_cast<double>(i), {i / 100.0}, 0, 0, 0, {}, {}});
  auto all = summarize_resources(s);
  EXPECT_NEAR(all.cpu_avg, 0.5, 1.0 / n);
  // window (0, 50] keeps samples 1..50, mean 0.255
  auto half = summarize_resources(s, Window{0, 50});
  EXPECT_EQ(half.sample_count, 50u);
  EXPECT_NEAR(half.cpu_avg, 0.255, 1e-12);
}

TEST(ResourcesProperty, DuplicateRemovalInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int round = 0; round < 30; ++round) {
    std::vector<MonitorSample> s;
    for (int i = 1; i <= 20; ++i) s.push_back({static_cast<double>(i), {u(rng), u(rng)}, u(rng) * 1e8, 0, 0, {}, {}});
    auto base = summarize_resources(s);
    std::vector<MonitorSample> dup;
    for (auto& x : s) {
      dup.push_back(x);
      if (rng() % 3 == 0) dup.push_back(x);
    }
    auto with_dups = summarize_resources(dup);
    EXPECT_EQ(with_dups.sample_count, base.sample_count);
    EXPECT_DOUBLE_EQ(with_dups.cpu_avg, base.cpu_avg);
    EXPECT_DOUBLE_EQ(with_dups.memory_avg, base.memory_avg);
  }
}

TEST(MonitorBandwidth, BytesPerIntervalToGbps) {
  std::vector<MonitorSample> s = {{1, {}, 0, 125e6, 0, {}, {}}, {2, {}, 0, 250e6, 0, {}, {}}};
  auto b = bandwidth_from_monitor(s, Role::Receiver, true);
  EXPECT_EQ(b.start, 0.0);
  EXPECT_EQ(b.values, (std::vector<double>{1.0, 2.0}));
}
