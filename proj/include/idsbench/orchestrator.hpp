#pragma once

#include "idsbench/error.hpp"
#include "idsbench/mock_ids.hpp"
#include "idsbench/monitor.hpp"
#include "idsbench/plan.hpp"
#include "idsbench/subprocess.hpp"
#include "idsbench/traceprep.hpp"

#include <array>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace idsbench {

/// The Table-II-style sequence every test walks through.
enum class Phase { Start, WaitForIDS, Monitoring, Evaluation, Output, End, Resting };

inline constexpr std::array<Phase, 7> kPhaseOrder = {Phase::Start,      Phase::WaitForIDS, Phase::Monitoring,
                                                     Phase::Evaluation, Phase::Output,     Phase::End,
                                                     Phase::Resting};

std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view name);

struct PhaseEntry {
  double epoch = 0;
  Phase phase = Phase::Start;
};

struct PhaseLog {
  std::vector<PhaseEntry> entries;
  std::optional<std::string> abort_reason;

  /// True when the entries are a prefix of kPhaseOrder (complete unless aborted).
  bool conforms() const;
  std::optional<double> epoch_of(Phase phase) const;
};

PhaseLog parse_phase_log(std::string_view text);
std::string format_phase_log(const PhaseLog& log);

enum class DeploymentMode { Mock, External };

struct DeploymentProfile {
  DeploymentMode mode = DeploymentMode::Mock;
  /// Real seconds per logical minute. 60 is real time; 0 runs unpaced.
  double time_compress = 0;
  double clock_skew_tolerance = 1.0;
  double ready_timeout = 10.0;     ///< real seconds
  double resting_seconds = 10.0;   ///< logical seconds
  double background_cadence = 1.0;  ///< logical seconds between background events
  std::uint32_t background_packet_bytes = 1500;
  std::uint64_t timeline_seed = 0;
  Ipv4 target_address = kSynthTarget;
  std::filesystem::path traces_dir;

  MockIdsConfig mock;

  // external mode
  std::string ids_command;
  std::string sender_command;      ///< `{trace}` is replaced by the trace path
  std::string background_command;  ///< `{gbps}` is replaced by the target bandwidth
  std::map<Role, std::string> monitor_commands;
  std::map<Role, std::string> clock_commands;
  std::string alerts_format = "fast";  ///< fast | eve
  std::string stats_format = "snort";  ///< snort | eve

  void validate() const;
};

/// `KEY=value` lines; see README for the key list.
DeploymentProfile parse_profile(std::string_view text);
DeploymentProfile load_profile(const std::filesystem::path& path);
std::string serialize_profile(const DeploymentProfile& profile);

enum class SendKind { Attack, Background };

struct SendEvent {
  double due = 0;  ///< logical seconds from test start
  std::string trace_id;
  SendKind kind = SendKind::Attack;
  int minute = 0;
  std::optional<AttackInstance> attack;
};

/// Attacks of minute m spread uniformly (seeded, stratified) over [60m, 60(m+1));
/// background events every `background_cadence` seconds. Sorted by due.
std::vector<SendEvent> build_timeline(const AttackPlan& plan, std::uint64_t seed = 0,
                                      double background_cadence = 1.0);

/// Thread-safe FIFO used for control lines and mock traffic hand-off.
template <typename T>
class Channel {
 public:
  void push(T value) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(value));
    }
    cv_.notify_all();
  }

  std::optional<T> pop_for(std::chrono::duration<double> timeout) {
    std::unique_lock lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); })) return std::nullopt;
    T v = std::move(queue_.front());
    queue_.pop_front();
    return v;
  }

  T pop() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return !queue_.empty(); });
    T v = std::move(queue_.front());
    queue_.pop_front();
    return v;
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<T> queue_;
};

/// Line-oriented control channel: the IDS side emits READY, the harness sends STOP.
struct ControlChannel {
  Channel<std::string> to_harness;
  Channel<std::string> to_ids;
};

struct ArtifactFile {
  std::string name;  ///< relative to the artifacts directory
  std::string role;  ///< sender | receiver | ids | harness
  std::string type;  ///< alerts:fast, alerts:eve, stats:snort, stats:eve, monitor, phases, plan, truth
  double clock_offset = 0;
};

struct Manifest {
  std::vector<ArtifactFile> files;
  bool aborted = false;

  const ArtifactFile* find_type_prefix(std::string_view prefix) const;
  const ArtifactFile* find(std::string_view role, std::string_view type) const;
};

Manifest parse_manifest(std::string_view text);
std::string format_manifest(const Manifest& manifest);

struct RawOutputs {
  std::filesystem::path artifacts_dir;
  Manifest manifest;
  PhaseLog phases;
  bool aborted = false;
  std::string abort_reason;
  /// Mock mode only: attack sources the IDS saw on the wire.
  std::set<Ipv4> observed_sources;
};

/// Infrastructure failure during run_test; carries whatever was collected.
class RunAborted : public InfrastructureError {
 public:
  RunAborted(const std::string& what, RawOutputs partial)
      : InfrastructureError(what), partial_(std::move(partial)) {}
  const RawOutputs& partial() const { return partial_; }

 private:
  RawOutputs partial_;
};

struct RunContext {
  std::filesystem::path artifacts_dir;
  const AttackPlan* plan = nullptr;
  const DeploymentProfile* profile = nullptr;
  double t0_epoch = 0;  ///< epoch of Evaluation start
};

/// The IDS under test, seen from the harness.
class IdsAdapter {
 public:
  virtual ~IdsAdapter() = default;

  virtual std::string id() const = 0;
  /// Launches the IDS; readiness arrives later as READY on control().
  virtual void start(const RunContext& ctx) = 0;
  virtual ControlChannel& control() = 0;
  /// Writes or registers the IDS's own outputs in the artifacts directory.
  virtual void collect_outputs(const RunContext& ctx, Manifest& manifest) = 0;
  /// Sends STOP and waits for the IDS to exit (kills it after a grace period).
  virtual void terminate() = 0;
};

/// In-process IDS driven by MockIdsEngine on its own worker thread.
class MockIdsAdapter : public IdsAdapter {
 public:
  explicit MockIdsAdapter(MockIdsConfig config);
  ~MockIdsAdapter() override;

  std::string id() const override { return "mock"; }
  void start(const RunContext& ctx) override;
  ControlChannel& control() override { return control_; }
  void collect_outputs(const RunContext& ctx, Manifest& manifest) override;
  void terminate() override;

  /// Hands one interval to the worker and waits for its outcome.
  IntervalOutcome offer(IntervalTraffic traffic);

  const MockIdsConfig& config() const { return config_; }
  /// Valid after terminate(); empty before start().
  const MockIdsEngine* engine() const { return engine_.get(); }

 private:
  void worker();

  MockIdsConfig config_;
  ControlChannel control_;
  std::unique_ptr<MockIdsEngine> engine_;
  Channel<std::optional<IntervalTraffic>> inbox_;
  Channel<IntervalOutcome> outbox_;
  std::thread thread_;
};

/// IDS launched as a shell command. It receives IDSBENCH_ALERTS, IDSBENCH_STATS and
/// IDSBENCH_T0 in its environment, prints READY on stdout and exits after reading STOP.
class ExternalIdsAdapter : public IdsAdapter {
 public:
  ExternalIdsAdapter(std::string id, std::string command);
  ~ExternalIdsAdapter() override;

  std::string id() const override { return id_; }
  void start(const RunContext& ctx) override;
  ControlChannel& control() override { return control_; }
  void collect_outputs(const RunContext& ctx, Manifest& manifest) override;
  void terminate() override;

 private:
  std::string id_;
  std::string command_;
  ControlChannel control_;
  std::unique_ptr<Subprocess> process_;
};

/// Mock profiles get a MockIdsAdapter, external ones an ExternalIdsAdapter.
std::unique_ptr<IdsAdapter> make_adapter(const DeploymentProfile& profile, const std::string& ids_id);

/// Executes one test through all phases; artifacts land in artifacts_dir.
/// Throws RunAborted on infrastructure failures, ValidationError on bad inputs.
RawOutputs run_test(const DeploymentProfile& profile, const AttackPlan& plan, IdsAdapter& ids,
                    const std::filesystem::path& artifacts_dir);

struct PhaseResult {
  std::vector<RawOutputs> completed;
  std::optional<std::string> error;
};

/// Runs plans sequentially (each into artifacts_root/sample_NNN), stopping at the first
/// infrastructure error. The adapter factory is called once per plan.
PhaseResult run_phase(const DeploymentProfile& profile, const std::vector<AttackPlan>& plans,
                      const std::function<std::unique_ptr<IdsAdapter>(const AttackPlan&)>& make_ids,
                      const std::filesystem::path& artifacts_root);

/// One plan per (bandwidth, attacks-per-minute) pair, bandwidth-major.
std::vector<AttackPlan> make_grid(const std::vector<Rational>& bandwidths,
                                  const std::vector<int>& attacks_per_minute, int minutes,
                                  const std::string& ids_id, std::uint64_t seed);

/// Uniform attack-type sampling with sequential unique sources from a pool.
struct PlanGenOptions {
  int minutes = 30;
  int attacks_per_minute = 10;
  Rational bandwidth_gbps{1};
  std::string ids_id = "mock";
  std::uint64_t seed = 1;
  Ipv4 pool_base{10, 9, 0, 0};
  int pool_prefix = 16;
  int flood_alert_threshold = kDefaultFloodThreshold;
};

/// Throws ValidationError when M * APM exceeds the pool.
AttackPlan generate_plan(const PlanGenOptions& options);

/// Usable host addresses in the pool (network and broadcast excluded).
std::vector<Ipv4> address_pool(Ipv4 base, int prefix);

}  // namespace idsbench
