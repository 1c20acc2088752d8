#include "idsbench/error.hpp"
#include "idsbench/orchestrator.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <random>

using namespace idsbench;
namespace fs = std::filesystem;

namespace {

AttackPlan small_plan(int minutes, int apm, std::int64_t gbps = 1, std::uint64_t seed = 1) {
  PlanGenOptions o;
  o.minutes = minutes;
  o.attacks_per_minute = apm;
  o.bandwidth_gbps = Rational(gbps);
  o.seed = seed;
  return generate_plan(o);
}

DeploymentProfile mock_profile() {
  DeploymentProfile p;
  p.resting_seconds = 0;
  p.mock.capacity_gbps = Rational(100);
  return p;
}

}  // namespace

TEST(Timeline, CountsPerMinuteExamples) {
  auto plan = small_plan(2, 3);
  auto events = build_timeline(plan, 0, 1000);
  std::map<int, int> per_minute;
  int attacks = 0;
  for (auto& e : events)
    if (e.kind == SendKind::Attack) {
      ++attacks;
      ++per_minute[static_cast<int>(e.due / 60)];
    }
  EXPECT_EQ(attacks, 6);
  EXPECT_EQ(per_minute[0], 3);
  EXPECT_EQ(per_minute[1], 3);

  std::vector<SendEvent> one;
  for (auto& e : build_timeline(small_plan(1, 1), 0, 1000))
    if (e.kind == SendKind::Attack) one.push_back(e);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_GE(one[0].due, 0);
  EXPECT_LT(one[0].due, 60);
}

TEST(Timeline, ThirtyMinuteGridSizes) {
  for (int apm : {10, 35}) {
    auto events = build_timeline(small_plan(30, apm), 3, 1.0);
    std::size_t attacks = 0, background = 0;
    for (auto& e : events) (e.kind == SendKind::Attack ? attacks : background)++;
    EXPECT_EQ(attacks, static_cast<std::size_t>(30 * apm));
    EXPECT_EQ(background, 1800u);
  }
}

TEST(TimelineProperty, DeterministicSortedAndBucketed) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 30; ++round) {
    auto plan = small_plan(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 12), 1, rng());
    auto seed = rng();
    auto a = build_timeline(plan, seed, 2.5);
    auto b = build_timeline(plan, seed, 2.5);
    ASSERT_EQ(a.size(), b.size());
    std::map<int, int> per_minute;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].due, b[i].due);
      EXPECT_EQ(a[i].trace_id, b[i].trace_id);
      if (i) EXPECT_LE(a[i - 1].due, a[i].due);
      if (a[i].kind != SendKind::Attack) continue;
      EXPECT_GE(a[i].due, 0);
      EXPECT_LT(a[i].due, 60.0 * plan.params.duration_minutes);
      int m = static_cast<int>(a[i].due / 60);
      EXPECT_EQ(m, a[i].minute);
      ++per_minute[m];
    }
    for (int m = 0; m < plan.params.duration_minutes; ++m) EXPECT_EQ(per_minute[m], plan.params.attacks_per_minute);
  }
}

TEST(PhaseLogTest, ParseFormatAndConformance) {
  PhaseLog log;
  double t = 100;
  for (auto p : kPhaseOrder) log.entries.push_back({t++, p});
  EXPECT_TRUE(log.conforms());
  auto back = parse_phase_log(format_phase_log(log));
  EXPECT_TRUE(back.conforms());
  EXPECT_EQ(back.epoch_of(Phase::Evaluation), 103.0);

  PhaseLog skipped = log;
  skipped.entries.erase(skipped.entries.begin() + 2);
  EXPECT_FALSE(skipped.conforms());
  PhaseLog prefix = log;
  prefix.entries.resize(3);
  EXPECT_FALSE(prefix.conforms());
  prefix.abort_reason = "IDS did not signal READY";
  EXPECT_TRUE(prefix.conforms());
  PhaseLog backwards = log;
  backwards.entries[4].epoch = 0;
  EXPECT_FALSE(backwards.conforms());
}

TEST(Profile, ParseValidateAndRoundTrip) {
  auto p = parse_profile("MODE=mock\nTIME_COMPRESS=1\nMOCK_CAPACITY_GBPS=3/2\nMOCK_STATS_STYLE=snort_like\n");
  EXPECT_EQ(p.time_compress, 1.0);
  EXPECT_EQ(p.mock.capacity_gbps, Rational(3, 2));
  EXPECT_EQ(p.mock.stats_style, StatsStyle::SnortLike);
  auto again = parse_profile(serialize_profile(p));
  EXPECT_EQ(serialize_profile(again), serialize_profile(p));
  EXPECT_THROW(parse_profile("BOGUS=1\n"), ParseError);
  EXPECT_THROW(parse_profile("MODE=external\n").validate(), ValidationError);
}

TEST(Manifest, RoundTrip) {
  Manifest m;
  m.files = {{"alerts.log", "ids", "alerts:eve", 0}, {"monitor_sender.log", "sender", "monitor", 0.25}};
  m.aborted = true;
  auto back = parse_manifest(format_manifest(m));
  EXPECT_TRUE(back.aborted);
  ASSERT_EQ(back.files.size(), 2u);
  EXPECT_EQ(back.find("sender", "monitor")->clock_offset, 0.25);
  EXPECT_EQ(back.find_type_prefix("alerts:")->name, "alerts.log");
  EXPECT_EQ(back.find("receiver", "monitor"), nullptr);
}

TEST(RunTest, MockSmokeContract) {
  testsupport::TempDir dir("run");
  auto profile = mock_profile();
  auto plan = small_plan(1, 3);
  auto ids = make_adapter(profile, "mock");
  auto out = run_test(profile, plan, *ids, dir.path());
  EXPECT_FALSE(out.aborted);
  EXPECT_TRUE(out.phases.conforms());
  EXPECT_EQ(out.phases.entries.size(), kPhaseOrder.size());
  for (const char* f : {"alerts.log", "ids_stats.log", "monitor_sender.log", "monitor_receiver.log",
                        "monitor_ids.log", "phase.log", "manifest"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_TRUE(out.manifest.find_type_prefix("alerts:"));
  EXPECT_TRUE(out.manifest.find_type_prefix("stats:"));
  for (auto role : {"sender", "receiver", "ids"}) EXPECT_TRUE(out.manifest.find(role, "monitor")) << role;
  auto on_disk = parse_phase_log(testsupport::slurp(dir / "phase.log"));
  EXPECT_TRUE(on_disk.conforms());
  std::set<Ipv4> sources;
  for (auto& [m, list] : plan.schedule)
    for (auto& a : list) sources.insert(a.source);
  EXPECT_EQ(out.observed_sources, sources);
}

TEST(RunTest, NeverReadyTimesOut) {
  testsupport::TempDir dir("never");
  auto profile = mock_profile();
  profile.mock.never_ready = true;
  profile.ready_timeout = 0.2;
  auto ids = make_adapter(profile, "mock");
  try {
    run_test(profile, small_plan(1, 1), *ids, dir.path());
    FAIL();
  } catch (const RunAborted& e) {
    EXPECT_NE(std::string(e.what()).find("READY"), std::string::npos);
    EXPECT_TRUE(e.partial().aborted);
    EXPECT_TRUE(e.partial().phases.conforms());
    EXPECT_TRUE(e.partial().manifest.aborted);
  }
  auto on_disk = parse_phase_log(testsupport::slurp(dir / "phase.log"));
  EXPECT_TRUE(on_disk.abort_reason.has_value());
  EXPECT_TRUE(on_disk.conforms());
}

TEST(RunTest, ReadyDelayIsWaitedFor) {
  testsupport::TempDir dir("delay");
  auto profile = mock_profile();
  profile.mock.ready_delay = 0.3;
  profile.ready_timeout = 5;
  auto ids = make_adapter(profile, "mock");
  auto begin = std::chrono::steady_clock::now();
  auto out = run_test(profile, small_plan(1, 1), *ids, dir.path());
  EXPECT_GE(std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count(), 0.3);
  EXPECT_TRUE(out.phases.conforms());
}

TEST(RunTest, TimeCompressedRunTracksWallClock) {
  testsupport::TempDir dir("paced");
  auto profile = mock_profile();
  profile.time_compress = 1;  // one real second per logical minute
  auto ids = make_adapter(profile, "mock");
  auto begin = std::chrono::steady_clock::now();
  auto out = run_test(profile, small_plan(3, 2), *ids, dir.path());
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  EXPECT_TRUE(out.phases.conforms());
  EXPECT_GE(wall, 3.0);
  EXPECT_LT(wall, 4.5);
}

TEST(RunTest, ExternalModeNeedsTraces) {
  testsupport::TempDir dir("ext");
  DeploymentProfile p;
  p.mode = DeploymentMode::External;
  p.ids_command = "true";
  p.sender_command = "true";
  p.traces_dir = dir / "traces";
  fs::create_directories(p.traces_dir);
  auto ids = make_adapter(p, "ext");
  EXPECT_THROW(run_test(p, small_plan(1, 1), *ids, dir / "out"), ValidationError);
}

TEST(RunPhase, TwoPlansInOrderAndEmptyRejected) {
  testsupport::TempDir dir("phase");
  auto profile = mock_profile();
  std::vector<AttackPlan> plans = {small_plan(1, 2, 2), small_plan(1, 2, 3)};
  auto factory = [&](const AttackPlan&) { return make_adapter(profile, "mock"); };
  auto result = run_phase(profile, plans, factory, dir.path());
  EXPECT_FALSE(result.error);
  ASSERT_EQ(result.completed.size(), 2u);
  EXPECT_EQ(result.completed[0].artifacts_dir.filename(), "sample_000");
  EXPECT_EQ(result.completed[1].artifacts_dir.filename(), "sample_001");
  EXPECT_EQ(load_plan(result.completed[1].artifacts_dir / "plan.txt").params.target_bandwidth_gbps, Rational(3));
  EXPECT_THROW(run_phase(profile, {}, factory, dir / "x"), ValidationError);
}

TEST(RunPhase, StopsAtFirstInfrastructureError) {
  testsupport::TempDir dir("phase_err");
  auto profile = mock_profile();
  profile.ready_timeout = 0.2;
  std::vector<AttackPlan> plans = {small_plan(1, 1, 1), small_plan(1, 1, 2), small_plan(1, 1, 3)};
  auto factory = [&](const AttackPlan& plan) {
    auto p = profile;
    p.mock.never_ready = plan.params.target_bandwidth_gbps == Rational(2);
    return make_adapter(p, "mock");
  };
  auto result = run_phase(profile, plans, factory, dir.path());
  EXPECT_EQ(result.completed.size(), 1u);
  ASSERT_TRUE(result.error);
  EXPECT_NE(result.error->find("READY"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "sample_002"));
}

TEST(Grid, FortyTwoPlans) {
  std::vector<Rational> bw;
  for (int g = 1; g <= 7; ++g) bw.emplace_back(g);
  auto grid = make_grid(bw, {10, 15, 20, 25, 30, 35}, 30, "mock", 9);
  ASSERT_EQ(grid.size(), 42u);
  EXPECT_EQ(grid[0].params.target_bandwidth_gbps, Rational(1));
  EXPECT_EQ(grid[0].params.attacks_per_minute, 10);
  EXPECT_EQ(grid[5].params.attacks_per_minute, 35);
  EXPECT_EQ(grid[6].params.target_bandwidth_gbps, Rational(2));
  for (auto& p : grid) EXPECT_EQ(p.attack_count(), static_cast<std::size_t>(30 * p.params.attacks_per_minute));
}

TEST(PlanGen, PoolBoundsAndExhaustion) {
  auto pool = address_pool(Ipv4{10, 9, 0, 0}, 24);
  EXPECT_EQ(pool.size(), 254u);
  EXPECT_EQ(pool.front(), (Ipv4{10, 9, 0, 1}));
  EXPECT_EQ(pool.back(), (Ipv4{10, 9, 0, 254}));
  EXPECT_THROW(address_pool(Ipv4{10, 9, 0, 0}, 31), ValidationError);
  PlanGenOptions o;
  o.minutes = 30;
  o.attacks_per_minute = 10;
  o.pool_prefix = 24;
  EXPECT_THROW(generate_plan(o), ValidationError);
  o.pool_prefix = 16;
  EXPECT_EQ(generate_plan(o).attack_count(), 300u);
}
