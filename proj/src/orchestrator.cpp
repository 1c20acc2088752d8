#include "idsbench/orchestrator.hpp"

#include "idsbench/error.hpp"
#include "idsbench/hash.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace idsbench {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_number(std::string_view s, const std::string& where) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(where + "invalid number '" + std::string(s) + "'");
  return v;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double wall_now() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InfrastructureError("cannot write " + path.string());
  out << content;
}

std::string replace_all(std::string s, std::string_view key, const std::string& value) {
  for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

// ---- phase log -------------------------------------------------------------

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Start: return "Start";
    case Phase::WaitForIDS: return "WaitForIDS";
    case Phase::Monitoring: return "Monitoring";
    case Phase::Evaluation: return "Evaluation";
    case Phase::Output: return "Output";
    case Phase::End: return "End";
    case Phase::Resting: return "Resting";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (auto p : kPhaseOrder)
    if (to_string(p) == name) return p;
  return std::nullopt;
}

bool PhaseLog::conforms() const {
  if (entries.size() > kPhaseOrder.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].phase != kPhaseOrder[i]) return false;
    if (i > 0 && entries[i].epoch < entries[i - 1].epoch) return false;
  }
  if (abort_reason) return true;
  return entries.size() == kPhaseOrder.size();
}

std::optional<double> PhaseLog::epoch_of(Phase phase) const {
  for (auto& e : entries)
    if (e.phase == phase) return e.epoch;
  return std::nullopt;
}

PhaseLog parse_phase_log(std::string_view text) {
  PhaseLog log;
  int n = 0;
  for (auto raw : split_lines(text)) {
    ++n;
    auto line = trim(raw);
    if (line.empty()) continue;
    const std::string where = "phase log line " + std::to_string(n) + ": ";
    if (line.starts_with("ABORT")) {
      log.abort_reason = std::string(trim(line.substr(5)));
      continue;
    }
    if (log.abort_reason) throw ParseError(where + "entry after ABORT");
    auto f = fields_of(line);
    if (f.size() != 2) throw ParseError(where + "expected '<epoch> <phase>'");
    auto phase = parse_phase(f[1]);
    if (!phase) throw ParseError(where + "unknown phase '" + std::string(f[1]) + "'");
    log.entries.push_back({to_number(f[0], where), *phase});
  }
  return log;
}

std::string format_phase_log(const PhaseLog& log) {
  std::string out;
  for (auto& e : log.entries) out += fixed6(e.epoch) + ' ' + std::string(to_string(e.phase)) + '\n';
  if (log.abort_reason) out += "ABORT " + *log.abort_reason + '\n';
  return out;
}

// ---- manifest --------------------------------------------------------------

const ArtifactFile* Manifest::find_type_prefix(std::string_view prefix) const {
  for (auto& f : files)
    if (std::string_view(f.type).starts_with(prefix)) return &f;
  return nullptr;
}

const ArtifactFile* Manifest::find(std::string_view role, std::string_view type) const {
  for (auto& f : files)
    if (f.role == role && f.type == type) return &f;
  return nullptr;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  int n = 0;
  for (auto raw : split_lines(text)) {
    ++n;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "ABORTED") {
      m.aborted = true;
      continue;
    }
    const std::string where = "manifest line " + std::to_string(n) + ": ";
    auto f = fields_of(line);
    if (f.size() != 4) throw ParseError(where + "expected '<file> <role> <type> <clock_offset>'");
    m.files.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]), to_number(f[3], where)});
  }
  return m;
}

std::string format_manifest(const Manifest& manifest) {
  std::string out = "# file role type clock_offset\n";
  for (auto& f : manifest.files) out += f.name + ' ' + f.role + ' ' + f.type + ' ' + fixed6(f.clock_offset) + '\n';
  if (manifest.aborted) out += "ABORTED\n";
  return out;
}

// ---- profile ---------------------------------------------------------------

void DeploymentProfile::validate() const {
  if (!(time_compress >= 0)) throw ValidationError("time_compress must be >= 0");
  if (!(clock_skew_tolerance >= 0)) throw ValidationError("clock_skew_tolerance must be >= 0");
  if (!(ready_timeout > 0)) throw ValidationError("ready_timeout must be > 0");
  if (!(resting_seconds >= 0)) throw ValidationError("resting_seconds must be >= 0");
  if (!(background_cadence > 0)) throw ValidationError("background_cadence must be > 0");
  if (background_packet_bytes == 0) throw ValidationError("background_packet_bytes must be > 0");
  if (alerts_format != "fast" && alerts_format != "eve")
    throw ValidationError("alerts format must be fast or eve, got '" + alerts_format + "'");
  if (stats_format != "snort" && stats_format != "eve")
    throw ValidationError("stats format must be snort or eve, got '" + stats_format + "'");
  if (mode == DeploymentMode::Mock) {
    mock.validate();
  } else {
    if (ids_command.empty()) throw ValidationError("external profile needs IDS_CMD");
    if (sender_command.empty()) throw ValidationError("external profile needs SENDER_CMD");
    if (traces_dir.empty()) throw ValidationError("external profile needs TRACES_DIR");
  }
}

DeploymentProfile parse_profile(std::string_view text) {
  DeploymentProfile p;
  int n = 0;
  for (auto raw : split_lines(text)) {
    ++n;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "profile line " + std::to_string(n) + ": ";
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + "expected KEY=value");
    const std::string key = upper(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    auto num = [&] { return to_number(value, where); };
    auto role_suffix = [&](std::string_view prefix) -> std::optional<Role> {
      if (!std::string_view(key).starts_with(prefix)) return std::nullopt;
      auto role = parse_role(lower(std::string_view(key).substr(prefix.size())));
      if (!role) throw ParseError(where + "unknown role in '" + key + "'");
      return role;
    };

    if (key == "MODE") {
      if (value == "mock") p.mode = DeploymentMode::Mock;
      else if (value == "external") p.mode = DeploymentMode::External;
      else throw ParseError(where + "MODE must be mock or external");
    } else if (key == "TIME_COMPRESS") p.time_compress = num();
    else if (key == "CLOCK_SKEW_TOLERANCE") p.clock_skew_tolerance = num();
    else if (key == "READY_TIMEOUT") p.ready_timeout = num();
    else if (key == "RESTING_SECONDS") p.resting_seconds = num();
    else if (key == "BACKGROUND_CADENCE") p.background_cadence = num();
    else if (key == "BACKGROUND_PACKET_BYTES") p.background_packet_bytes = static_cast<std::uint32_t>(num());
    else if (key == "TIMELINE_SEED") p.timeline_seed = static_cast<std::uint64_t>(num());
    else if (key == "TARGET") {
      auto ip = Ipv4::parse(value);
      if (!ip) throw ParseError(where + "invalid TARGET address");
      p.target_address = *ip;
    } else if (key == "TRACES_DIR") p.traces_dir = value;
    else if (key == "MOCK_CAPACITY_GBPS") p.mock.capacity_gbps = parse_rational(value);
    else if (key == "MOCK_DEGRADATION") p.mock.detection_degradation = num();
    else if (key == "MOCK_KNEE") p.mock.degradation_knee = static_cast<int>(num());
    else if (key == "MOCK_OPTIONAL_FRACTION") p.mock.optional_emit_fraction = num();
    else if (key == "MOCK_STATS_STYLE") {
      auto s = parse_stats_style(value);
      if (!s) throw ParseError(where + "MOCK_STATS_STYLE must be snort_like or suricata_like");
      p.mock.stats_style = *s;
    } else if (key == "MOCK_MEMORY_BYTES") p.mock.memory_footprint = static_cast<std::uint64_t>(num());
    else if (key == "MOCK_READY_DELAY") p.mock.ready_delay = num();
    else if (key == "MOCK_NEVER_READY") p.mock.never_ready = value == "1" || value == "true";
    else if (key == "MOCK_BASE_CPU") p.mock.base_cpu = num();
    else if (key == "MOCK_CORES") p.mock.cores = static_cast<int>(num());
    else if (key == "IDS_CMD") p.ids_command = value;
    else if (key == "SENDER_CMD") p.sender_command = value;
    else if (key == "BACKGROUND_CMD") p.background_command = value;
    else if (key == "ALERTS_FORMAT") p.alerts_format = value;
    else if (key == "STATS_FORMAT") p.stats_format = value;
    else if (auto r = role_suffix("MONITOR_CMD_")) p.monitor_commands[*r] = value;
    else if (auto r2 = role_suffix("CLOCK_CMD_")) p.clock_commands[*r2] = value;
    else throw ParseError(where + "unknown key '" + key + "'");
  }
  p.validate();
  return p;
}

DeploymentProfile load_profile(const fs::path& path) { return parse_profile(read_text_file(path)); }

std::string serialize_profile(const DeploymentProfile& p) {
  std::ostringstream o;
  o << "MODE=" << (p.mode == DeploymentMode::Mock ? "mock" : "external") << '\n'
    << "TIME_COMPRESS=" << p.time_compress << '\n'
    << "CLOCK_SKEW_TOLERANCE=" << p.clock_skew_tolerance << '\n'
    << "READY_TIMEOUT=" << p.ready_timeout << '\n'
    << "RESTING_SECONDS=" << p.resting_seconds << '\n'
    << "BACKGROUND_CADENCE=" << p.background_cadence << '\n'
    << "BACKGROUND_PACKET_BYTES=" << p.background_packet_bytes << '\n'
    << "TIMELINE_SEED=" << p.timeline_seed << '\n'
    << "TARGET=" << p.target_address.to_string() << '\n';
  if (!p.traces_dir.empty()) o << "TRACES_DIR=" << p.traces_dir.string() << '\n';
  o << "MOCK_CAPACITY_GBPS=" << to_exact_string(p.mock.capacity_gbps) << '\n'
    << "MOCK_DEGRADATION=" << p.mock.detection_degradation << '\n'
    << "MOCK_KNEE=" << p.mock.degradation_knee << '\n'
    << "MOCK_OPTIONAL_FRACTION=" << p.mock.optional_emit_fraction << '\n'
    << "MOCK_STATS_STYLE=" << to_string(p.mock.stats_style) << '\n'
    << "MOCK_MEMORY_BYTES=" << p.mock.memory_footprint << '\n'
    << "MOCK_READY_DELAY=" << p.mock.ready_delay << '\n'
    << "MOCK_NEVER_READY=" << (p.mock.never_ready ? 1 : 0) << '\n'
    << "MOCK_BASE_CPU=" << p.mock.base_cpu << '\n'
    << "MOCK_CORES=" << p.mock.cores << '\n'
    << "ALERTS_FORMAT=" << p.alerts_format << '\n'
    << "STATS_FORMAT=" << p.stats_format << '\n';
  if (!p.ids_command.empty()) o << "IDS_CMD=" << p.ids_command << '\n';
  if (!p.sender_command.empty()) o << "SENDER_CMD=" << p.sender_command << '\n';
  if (!p.background_command.empty()) o << "BACKGROUND_CMD=" << p.background_command << '\n';
  for (auto& [r, c] : p.monitor_commands) o << "MONITOR_CMD_" << upper(to_string(r)) << '=' << c << '\n';
  for (auto& [r, c] : p.clock_commands) o << "CLOCK_CMD_" << upper(to_string(r)) << '=' << c << '\n';
  return o.str();
}

// ---- timeline --------------------------------------------------------------

std::vector<SendEvent> build_timeline(const AttackPlan& plan, std::uint64_t seed, double background_cadence) {
  validate(plan);
  if (!(background_cadence > 0)) throw ValidationError("background cadence must be > 0");
  std::vector<SendEvent> events;
  for (auto& [minute, attacks] : plan.schedule) {
    // one stratum of 60/k seconds per attack, slot order shuffled
    const std::size_t k = attacks.size();
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(minute + 1)));
    std::vector<std::size_t> slots(k);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double lo = 60.0 * minute, hi = 60.0 * (minute + 1);
    for (std::size_t i = 0; i < k; ++i) {
      double due = lo + 60.0 * (static_cast<double>(slots[i]) + u(rng)) / static_cast<double>(k);
      if (due >= hi) due = std::nextafter(hi, lo);
      events.push_back({due, attacks[i].trace_id, SendKind::Attack, minute, attacks[i]});
    }
  }
  const double end = 60.0 * plan.params.duration_minutes;
  for (std::int64_t i = 0;; ++i) {
    const double due = static_cast<double>(i) * background_cadence;
    if (due >= end) break;
    events.push_back({due, "background", SendKind::Background, static_cast<int>(due / 60.0), std::nullopt});
  }
  std::stable_sort(events.begin(), events.end(), [](const SendEvent& a, const SendEvent& b) { return a.due < b.due; });
  return events;
}

// ---- mock adapter ----------------------------------------------------------

MockIdsAdapter::MockIdsAdapter(MockIdsConfig config) : config_(std::move(config)) { config_.validate(); }

MockIdsAdapter::~MockIdsAdapter() { terminate(); }

void MockIdsAdapter::start(const RunContext& ctx) {
  MockIdsConfig cfg = config_;
  if (ctx.plan) cfg.flood_alert_threshold = ctx.plan->params.flood_alert_threshold;
  engine_ = std::make_unique<MockIdsEngine>(std::move(cfg), ctx.t0_epoch);
  thread_ = std::thread([this] { worker(); });
}

void MockIdsAdapter::worker() {
  if (config_.never_ready) {
    control_.to_ids.pop();  // only STOP ends it
    return;
  }
  if (control_.to_ids.pop_for(std::chrono::duration<double>(config_.ready_delay))) return;
  control_.to_harness.push("READY");
  for (;;) {
    auto item = inbox_.pop();
    if (!item) return;
    outbox_.push(engine_->process(*item));
  }
}

IntervalOutcome MockIdsAdapter::offer(IntervalTraffic traffic) {
  inbox_.push(std::move(traffic));
  return outbox_.pop();
}

void MockIdsAdapter::collect_outputs(const RunContext& ctx, Manifest& manifest) {
  if (!engine_) return;
  auto join = [](const std::vector<std::string>& lines) {
    std::string s;
    for (auto& l : lines) s += l + '\n';
    return s;
  };
  const bool eve = config_.stats_style == StatsStyle::SuricataLike;
  write_file(ctx.artifacts_dir / "alerts.log", join(engine_->alert_lines()));
  write_file(ctx.artifacts_dir / "ids_stats.log", join(engine_->stats_lines()));
  std::string truth;
  for (auto& id : engine_->analyzed_traces()) truth += "analyzed " + id + '\n';
  for (auto& id : engine_->dropped_traces()) truth += "dropped " + id + '\n';
  write_file(ctx.artifacts_dir / "mock_truth.log", truth);
  manifest.files.push_back({"alerts.log", "ids", eve ? "alerts:eve" : "alerts:fast", 0});
  manifest.files.push_back({"ids_stats.log", "ids", eve ? "stats:eve" : "stats:snort", 0});
  manifest.files.push_back({"mock_truth.log", "ids", "truth", 0});
}

void MockIdsAdapter::terminate() {
  if (!thread_.joinable()) return;
  control_.to_ids.push("STOP");
  inbox_.push(std::nullopt);
  thread_.join();
}

// ---- external adapter ------------------------------------------------------

ExternalIdsAdapter::ExternalIdsAdapter(std::string id, std::string command)
    : id_(std::move(id)), command_(std::move(command)) {}

ExternalIdsAdapter::~ExternalIdsAdapter() { terminate(); }

void ExternalIdsAdapter::start(const RunContext& ctx) {
  std::map<std::string, std::string> env{
      {"IDSBENCH_ALERTS", (ctx.artifacts_dir / "alerts.log").string()},
      {"IDSBENCH_STATS", (ctx.artifacts_dir / "ids_stats.log").string()},
      {"IDSBENCH_T0", fixed6(ctx.t0_epoch)},
  };
  process_ = std::make_unique<Subprocess>(command_, env,
                                          [this](const std::string& line) { control_.to_harness.push(line); });
}

void ExternalIdsAdapter::collect_outputs(const RunContext& ctx, Manifest& manifest) {
  const auto* profile = ctx.profile;
  const std::string alerts = "alerts:" + (profile ? profile->alerts_format : std::string("fast"));
  const std::string stats = "stats:" + (profile ? profile->stats_format : std::string("snort"));
  double offset = 0;
  for (auto& f : manifest.files)
    if (f.role == "ids") offset = f.clock_offset;
  if (fs::exists(ctx.artifacts_dir / "alerts.log")) manifest.files.push_back({"alerts.log", "ids", alerts, offset});
  if (fs::exists(ctx.artifacts_dir / "ids_stats.log"))
    manifest.files.push_back({"ids_stats.log", "ids", stats, offset});
}

void ExternalIdsAdapter::terminate() {
  if (!process_) return;
  process_->write_line("STOP");
  process_->close_stdin();
  if (!process_->wait_for(std::chrono::seconds(5))) process_->terminate();
  process_.reset();
}

std::unique_ptr<IdsAdapter> make_adapter(const DeploymentProfile& profile, const std::string& ids_id) {
  if (profile.mode == DeploymentMode::External) return std::make_unique<ExternalIdsAdapter>(ids_id, profile.ids_command);
  MockIdsConfig cfg = profile.mock;
  if (cfg.detection_table.empty()) cfg.detection_table = detection_table_from(parse_priorities(default_priorities_text()));
  if (cfg.aliases.empty()) cfg.aliases = parse_mapping(default_mapping_text());
  return std::make_unique<MockIdsAdapter>(std::move(cfg));
}

// ---- run_test --------------------------------------------------------------

namespace {

struct TraceSummary {
  fs::path path;
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  double duration = 0;
  std::string protocol = "TCP";
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
};

TraceSummary summarize(const std::vector<PacketRecord>& packets) {
  TraceSummary s;
  s.packets = packets.size();
  for (auto& p : packets) s.bytes += p.orig_len;
  if (!packets.empty()) {
    s.duration = static_cast<double>(packets.back().timestamp.micros() - packets.front().timestamp.micros()) / 1e6;
    s.protocol = protocol_name(packets.front().protocol);
    s.src_port = packets.front().src_port.value_or(0);
    s.dst_port = packets.front().dst_port.value_or(0);
  }
  return s;
}

/// Looks up (or, in mock mode, synthesizes) the prepared trace for every attack.
std::map<std::string, TraceSummary> resolve_traces(const DeploymentProfile& profile, const AttackPlan& plan) {
  std::map<std::string, TraceSummary> out;
  const bool mock = profile.mode == DeploymentMode::Mock;
  for (auto& [minute, attacks] : plan.schedule) {
    for (auto& a : attacks) {
      fs::path path = profile.traces_dir.empty() ? fs::path() : profile.traces_dir / (a.trace_id + ".pcap");
      if (!path.empty() && fs::exists(path)) {
        if (mock) out[a.trace_id] = summarize(read_capture(path));
        out[a.trace_id].path = path;
        continue;
      }
      if (!mock) throw ValidationError("trace not found: " + path.string());
      auto raw = synth_attack_capture(a.type, fnv1a(a.trace_id), plan.params.flood_alert_threshold);
      auto trace = prepare_trace(raw, a.trace_id, a.type, kSynthAttacker, a.source, kSynthTarget);
      out[a.trace_id] = summarize(trace.packets);
    }
  }
  return out;
}

/// What the tick loop drives. Driver calls come from one thread each; end_interval from the
/// barrier completion; snapshot after the completion that produced it.
class Wire {
 public:
  virtual ~Wire() = default;
  virtual void attack(std::int64_t interval, const SendEvent& event) = 0;
  virtual void background(std::int64_t interval, const SendEvent& event) = 0;
  virtual void end_interval(std::int64_t interval) = 0;
  virtual MonitorSample snapshot(Role role) const = 0;
  virtual void finish() = 0;
};

MonitorSample idle_sample(Role role, const MockIdsConfig& cfg) {
  MonitorSample s;
  s.cpu_per_core.assign(role == Role::Ids ? static_cast<std::size_t>(cfg.cores) : 2, 0.0);
  s.memory = role == Role::Ids ? static_cast<double>(cfg.memory_footprint) : 64.0 * 1024 * 1024;
  s.packets_in = 0;
  s.packets_out = 0;
  return s;
}

class MockWire : public Wire {
 public:
  MockWire(MockIdsAdapter& ids, const DeploymentProfile& profile, const AttackPlan& plan,
           const std::map<std::string, TraceSummary>& traces)
      : ids_(ids), profile_(profile), plan_(plan), traces_(traces) {
    // bw * 1e9 / 8 bytes per second, times the cadence
    const Rational per_event = plan.params.target_bandwidth_gbps * Rational(125'000'000) *
                               parse_rational(fixed6(profile.background_cadence));
    bg_event_bytes_ = static_cast<std::uint64_t>(std::ceil(to_double(per_event)));
    bg_event_packets_ = (bg_event_bytes_ + profile.background_packet_bytes - 1) / profile.background_packet_bytes;
    for (auto r : {Role::Sender, Role::Receiver, Role::Ids}) snapshots_[static_cast<int>(r)] = idle_sample(r, ids.config());
  }

  void attack(std::int64_t, const SendEvent& e) override {
    auto& tr = traces_.at(e.trace_id);
    OfferedAttack a;
    a.type = e.attack->type;
    a.trace_id = e.trace_id;
    a.source = e.attack->source;
    a.target = profile_.target_address;
    a.start = e.due;
    a.duration = tr.duration;
    a.packets = tr.packets;
    a.bytes = tr.bytes;
    a.protocol = tr.protocol;
    a.src_port = tr.src_port;
    a.dst_port = tr.dst_port;
    a.concurrent = static_cast<int>(plan_.schedule.at(e.minute).size());
    pending_.attacks.push_back(std::move(a));
  }

  void background(std::int64_t, const SendEvent&) override {
    bg_packets_ += bg_event_packets_;
    bg_bytes_ += bg_event_bytes_;
  }

  void end_interval(std::int64_t interval) override {
    IntervalTraffic traffic = std::move(pending_);
    pending_ = {};
    traffic.index = interval;
    traffic.background_packets = bg_packets_;
    traffic.background_bytes = bg_bytes_;
    bg_packets_ = bg_bytes_ = 0;
    const double t = static_cast<double>(interval + 1);
    const auto offered_packets = static_cast<double>(traffic.offered_packets());
    const auto offered_bytes = static_cast<double>(traffic.offered_bytes());

    auto outcome = ids_.offer(std::move(traffic));

    MonitorSample sender = idle_sample(Role::Sender, ids_.config());
    sender.t = t;
    sender.cpu_per_core[0] = std::min(1.0, 0.05 + outcome.offered_gbps / 10.0);
    sender.bytes_out = offered_bytes;
    sender.packets_out = offered_packets;
    MonitorSample receiver = idle_sample(Role::Receiver, ids_.config());
    receiver.t = t;
    receiver.cpu_per_core[0] = std::min(1.0, 0.02 + outcome.offered_gbps / 20.0);
    receiver.bytes_in = offered_bytes;
    receiver.packets_in = offered_packets;
    snapshots_[static_cast<int>(Role::Sender)] = sender;
    snapshots_[static_cast<int>(Role::Receiver)] = receiver;
    snapshots_[static_cast<int>(Role::Ids)] = outcome.ids_sample;
  }

  MonitorSample snapshot(Role role) const override { return snapshots_[static_cast<int>(role)]; }
  void finish() override {}

 private:
  MockIdsAdapter& ids_;
  const DeploymentProfile& profile_;
  const AttackPlan& plan_;
  const std::map<std::string, TraceSummary>& traces_;
  std::uint64_t bg_event_bytes_ = 0, bg_event_packets_ = 0;
  IntervalTraffic pending_;
  std::uint64_t bg_packets_ = 0, bg_bytes_ = 0;
  std::array<MonitorSample, 3> snapshots_;
};

class ExternalWire : public Wire {
 public:
  ExternalWire(const DeploymentProfile& profile, const AttackPlan& plan,
               const std::map<std::string, TraceSummary>& traces)
      : profile_(profile), plan_(plan), traces_(traces) {}

  void attack(std::int64_t, const SendEvent& e) override {
    std::string cmd = replace_all(profile_.sender_command, "{trace}", traces_.at(e.trace_id).path.string());
    cmd = replace_all(cmd, "{src}", e.attack->source.to_string());
    senders_.push_back(std::make_unique<Subprocess>(cmd, std::map<std::string, std::string>{}, nullptr));
  }

  void background(std::int64_t, const SendEvent&) override {
    if (background_ || profile_.background_command.empty()) return;
    auto cmd = replace_all(profile_.background_command, "{gbps}", to_exact_string(plan_.params.target_bandwidth_gbps));
    background_ = std::make_unique<Subprocess>(cmd, std::map<std::string, std::string>{}, nullptr);
  }

  void end_interval(std::int64_t) override {}
  MonitorSample snapshot(Role) const override { return {}; }

  void finish() override {
    for (auto& s : senders_)
      if (!s->wait_for(std::chrono::seconds(30))) s->terminate();
    senders_.clear();
    background_.reset();
  }

 private:
  const DeploymentProfile& profile_;
  const AttackPlan& plan_;
  const std::map<std::string, TraceSummary>& traces_;
  std::vector<std::unique_ptr<Subprocess>> senders_;
  std::unique_ptr<Subprocess> background_;
};

/// Owns phase.log and rewrites it after every transition so a crash leaves a valid prefix.
class PhaseRecorder {
 public:
  explicit PhaseRecorder(fs::path path) : path_(std::move(path)) {}
  void enter(Phase p, double epoch) {
    log_.entries.push_back({epoch, p});
    write_file(path_, format_phase_log(log_));
  }
  void abort(const std::string& reason) {
    log_.abort_reason = reason;
    write_file(path_, format_phase_log(log_));
  }
  const PhaseLog& log() const { return log_; }

 private:
  fs::path path_;
  PhaseLog log_;
};

void sleep_real(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

RawOutputs run_test(const DeploymentProfile& profile, const AttackPlan& plan, IdsAdapter& ids,
                    const fs::path& artifacts_dir) {
  profile.validate();
  validate(plan);
  const bool mock = profile.mode == DeploymentMode::Mock;
  auto* mock_ids = dynamic_cast<MockIdsAdapter*>(&ids);
  if (mock && !mock_ids) throw ValidationError("mock profile needs the in-process mock IDS");
  fs::create_directories(artifacts_dir);

  const std::int64_t n_intervals = 60LL * plan.params.duration_minutes;
  const double seconds_per_logical = profile.time_compress / 60.0;  // real per logical second
  // mock stamps are logical: Evaluation starts at t0, everything before it is one second apart
  const double t0 = mock ? std::floor(wall_now()) + 2.0 : wall_now();
  auto stamp = [&](double logical) { return mock ? t0 + logical : wall_now(); };

  RunContext ctx{artifacts_dir, &plan, &profile, t0};
  PhaseRecorder phases(artifacts_dir / "phase.log");
  Manifest manifest;
  manifest.files.push_back({"phase.log", "harness", "phases", 0});
  manifest.files.push_back({"plan.txt", "harness", "plan", 0});
  RawOutputs out;
  out.artifacts_dir = artifacts_dir;

  std::map<Role, double> clock_offsets;
  bool outputs_collected = false;
  auto finish_outputs = [&] {
    if (outputs_collected) return;
    outputs_collected = true;
    ids.collect_outputs(ctx, manifest);
    if (mock_ids && mock_ids->engine()) out.observed_sources = mock_ids->engine()->observed_sources();
  };
  auto abort = [&](const std::string& reason) {
    phases.abort(reason);
    finish_outputs();
    ids.terminate();
    manifest.aborted = true;
    write_file(artifacts_dir / "manifest", format_manifest(manifest));
    out.manifest = manifest;
    out.phases = phases.log();
    out.aborted = true;
    out.abort_reason = reason;
    throw RunAborted(reason, out);
  };

  // Start: IDS up, attacks read
  phases.enter(Phase::Start, stamp(-2));
  write_file(artifacts_dir / "plan.txt", serialize_plan(plan));
  const auto traces = resolve_traces(profile, plan);
  const auto timeline = build_timeline(plan, profile.timeline_seed, profile.background_cadence);
  ids.start(ctx);

  // WaitForIDS
  phases.enter(Phase::WaitForIDS, stamp(-2));
  {
    const auto deadline = Clock::now() + std::chrono::duration<double>(profile.ready_timeout);
    bool ready = false;
    while (!ready) {
      auto left = std::chrono::duration<double>(deadline - Clock::now());
      if (left.count() <= 0) break;
      auto line = ids.control().to_harness.pop_for(left);
      if (line && trim(*line) == "READY") ready = true;
    }
    if (!ready) abort("IDS did not signal READY within " + fixed6(profile.ready_timeout) + " s");
  }

  if (!mock) {
    for (auto& [role, cmd] : profile.clock_commands) {
      double before = wall_now();
      double remote;
      try {
        remote = to_number(trim(run_command(cmd)), "clock of " + std::string(to_string(role)) + ": ");
      } catch (const std::exception& e) {
        abort(std::string("clock query failed: ") + e.what());
      }
      double offset = remote - (before + wall_now()) / 2.0;
      clock_offsets[role] = offset;
      if (std::fabs(offset) > profile.clock_skew_tolerance)
        abort("clock skew of " + std::string(to_string(role)) + " is " + fixed6(offset) + " s, tolerance " +
              fixed6(profile.clock_skew_tolerance) + " s");
    }
  }

  // Monitoring: collectors come up and record a pre-roll sample
  phases.enter(Phase::Monitoring, stamp(-1));
  std::unique_ptr<Wire> wire;
  if (mock) wire = std::make_unique<MockWire>(*mock_ids, profile, plan, traces);
  else wire = std::make_unique<ExternalWire>(profile, plan, traces);

  constexpr std::array<Role, 3> kRoles = {Role::Sender, Role::Receiver, Role::Ids};
  std::array<std::ofstream, 3> monitor_files;
  std::vector<std::unique_ptr<Subprocess>> monitor_procs;
  for (std::size_t i = 0; i < kRoles.size(); ++i) {
    const std::string name = "monitor_" + std::string(to_string(kRoles[i])) + ".log";
    if (!mock && !profile.monitor_commands.contains(kRoles[i])) continue;
    monitor_files[i].open(artifacts_dir / name, std::ios::trunc);
    if (!monitor_files[i]) abort("cannot open " + name);
    double offset = clock_offsets.contains(kRoles[i]) ? clock_offsets[kRoles[i]] : 0.0;
    manifest.files.push_back({name, std::string(to_string(kRoles[i])), "monitor", offset});
    if (mock) {
      auto idle = idle_sample(kRoles[i], mock_ids->config());
      monitor_files[i] << format_monitor_line(t0, idle) << '\n';
    } else {
      auto* file = &monitor_files[i];
      monitor_procs.push_back(std::make_unique<Subprocess>(
          profile.monitor_commands.at(kRoles[i]), std::map<std::string, std::string>{},
          [file](const std::string& line) { *file << line << '\n'; }));
    }
  }
  if (!mock)
    for (auto& f : manifest.files)
      if (f.role == "ids" && clock_offsets.contains(Role::Ids)) f.clock_offset = clock_offsets[Role::Ids];

  // Evaluation: replay driver, background driver and three collectors step through logical
  // seconds together; the barrier completion closes each interval and paces the run.
  phases.enter(Phase::Evaluation, stamp(0));
  {
    std::vector<const SendEvent*> attack_events, background_events;
    for (auto& e : timeline) (e.kind == SendKind::Attack ? attack_events : background_events).push_back(&e);

    std::atomic<bool> stop{false};
    std::string failure;
    const auto real_start = Clock::now();
    std::int64_t round = 0;
    auto on_completion = [&]() noexcept {
      try {
        if (round < n_intervals) wire->end_interval(round);
        if (seconds_per_logical > 0 && round < n_intervals) {
          auto target = real_start + std::chrono::duration_cast<Clock::duration>(
                                         std::chrono::duration<double>((round + 1) * seconds_per_logical));
          auto lag = std::chrono::duration<double>(Clock::now() - target).count();
          if (lag > 60.0 * seconds_per_logical) {
            failure = "replay fell behind schedule by " + fixed6(lag) + " s";
            stop = true;
          } else {
            std::this_thread::sleep_until(target);
          }
        }
      } catch (const std::exception& e) {
        failure = e.what();
        stop = true;
      }
      ++round;
    };
    std::barrier sync(5, on_completion);

    auto driver = [&](const std::vector<const SendEvent*>& events, bool attacks) {
      std::size_t next = 0;
      for (std::int64_t r = 0; r <= n_intervals; ++r) {
        try {
          while (r < n_intervals && next < events.size() &&
                 static_cast<std::int64_t>(events[next]->due) <= r) {
            if (attacks) wire->attack(r, *events[next]);
            else wire->background(r, *events[next]);
            ++next;
          }
        } catch (const std::exception& e) {
          // the completion reports it; only this thread writes failure before the barrier
          if (!stop.exchange(true)) failure = e.what();
        }
        sync.arrive_and_wait();
        if (stop) break;
      }
    };
    auto collector = [&](std::size_t i) {
      for (std::int64_t r = 0; r <= n_intervals; ++r) {
        if (mock && r >= 1 && monitor_files[i].is_open())
          monitor_files[i] << format_monitor_line(t0 + static_cast<double>(r), wire->snapshot(kRoles[i])) << '\n';
        sync.arrive_and_wait();
        if (stop) break;
      }
      if (mock) monitor_files[i].flush();
    };

    std::vector<std::thread> workers;
    workers.emplace_back(driver, std::cref(attack_events), true);
    workers.emplace_back(driver, std::cref(background_events), false);
    for (std::size_t i = 0; i < 3; ++i) workers.emplace_back(collector, i);
    for (auto& w : workers) w.join();

    for (auto& p : monitor_procs) p->terminate();
    monitor_procs.clear();
    for (auto& f : monitor_files) f.close();
    if (stop) {
      wire->finish();
      abort(failure.empty() ? std::string("evaluation stopped") : failure);
    }
    wire->finish();
  }

  // Output
  const double end_logical = static_cast<double>(n_intervals);
  phases.enter(Phase::Output, stamp(end_logical));
  finish_outputs();
  write_file(artifacts_dir / "manifest", format_manifest(manifest));

  // End
  phases.enter(Phase::End, stamp(end_logical));
  ids.terminate();

  // Resting
  phases.enter(Phase::Resting, stamp(end_logical));
  sleep_real(profile.resting_seconds * seconds_per_logical);

  out.manifest = manifest;
  out.phases = phases.log();
  return out;
}

PhaseResult run_phase(const DeploymentProfile& profile, const std::vector<AttackPlan>& plans,
                      const std::function<std::unique_ptr<IdsAdapter>(const AttackPlan&)>& make_ids,
                      const fs::path& artifacts_root) {
  if (plans.empty()) throw ValidationError("a test phase needs at least one plan");
  PhaseResult result;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%03zu", i);
    auto ids = make_ids(plans[i]);
    try {
      result.completed.push_back(run_test(profile, plans[i], *ids, artifacts_root / name));
    } catch (const InfrastructureError& e) {
      result.error = std::string(name) + ": " + e.what();
      break;
    }
  }
  return result;
}

// ---- plan generation -------------------------------------------------------

std::vector<Ipv4> address_pool(Ipv4 base, int prefix) {
  if (prefix < 8 || prefix > 30) throw ValidationError("address pool prefix must be in [8, 30]");
  const std::uint32_t mask = prefix == 0 ? 0 : ~std::uint32_t{0} << (32 - prefix);
  const std::uint32_t network = base.value() & mask;
  const std::uint32_t broadcast = network | ~mask;
  std::vector<Ipv4> pool;
  pool.reserve(broadcast - network - 1);
  for (std::uint32_t v = network + 1; v < broadcast; ++v) pool.push_back(Ipv4(v));
  return pool;
}

AttackPlan generate_plan(const PlanGenOptions& o) {
  if (o.minutes < 1) throw ValidationError("minutes must be >= 1");
  if (o.attacks_per_minute < 1) throw ValidationError("attacks per minute must be >= 1");
  const auto pool = address_pool(o.pool_base, o.pool_prefix);
  const auto needed = static_cast<std::size_t>(o.minutes) * static_cast<std::size_t>(o.attacks_per_minute);
  if (needed > pool.size())
    throw ValidationError("address pool " + o.pool_base.to_string() + "/" + std::to_string(o.pool_prefix) +
                          " has " + std::to_string(pool.size()) + " addresses, plan needs " +
                          std::to_string(needed));
  AttackPlan plan;
  plan.params = {o.minutes, o.attacks_per_minute, o.bandwidth_gbps, o.ids_id, o.flood_alert_threshold};
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> pick(0, kAllAttackTypes.size() - 1);
  std::size_t k = 0;
  for (int m = 0; m < o.minutes; ++m) {
    auto& slot = plan.schedule[m];
    for (int j = 0; j < o.attacks_per_minute; ++j, ++k) {
      const AttackType type = kAllAttackTypes[pick(rng)];
      char id[64];
      std::snprintf(id, sizeof id, "%s_%05zu", std::string(to_string(type)).c_str(), k);
      slot.push_back({type, id, pool[k]});
    }
  }
  validate(plan);
  return plan;
}

std::vector<AttackPlan> make_grid(const std::vector<Rational>& bandwidths, const std::vector<int>& attacks_per_minute,
                                  int minutes, const std::string& ids_id, std::uint64_t seed) {
  std::vector<AttackPlan> plans;
  for (auto& bw : bandwidths) {
    for (int apm : attacks_per_minute) {
      PlanGenOptions o;
      o.minutes = minutes;
      o.attacks_per_minute = apm;
      o.bandwidth_gbps = bw;
      o.ids_id = ids_id;
      o.seed = seed;
      plans.push_back(generate_plan(o));
    }
  }
  return plans;
}

}  // namespace idsbench
