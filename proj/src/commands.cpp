#include "idsbench/commands.hpp"

#include "idsbench/error.hpp"
#include "idsbench/orchestrator.hpp"
#include "idsbench/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace idsbench {

namespace fs = std::filesystem;

namespace {

struct RunOptions {
  std::string plan;
  std::string profile;
  std::string priorities;
  std::string mapping;
  std::string out_dir;
  std::optional<double> time_compress;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mock_capacity;
  std::optional<double> mock_degradation;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--profile", o.profile, "Deployment profile (KEY=value lines); built-in mock profile if omitted");
  cmd->add_option("--priorities", o.priorities, "Priority file; built-in profile if omitted");
  cmd->add_option("--mapping", o.mapping, "Message mapping file; built-in mapping if omitted");
  cmd->add_option("--out-dir", o.out_dir, "Artifacts directory (default: $IDSBENCH_ARTIFACTS or ./artifacts)");
  cmd->add_option("--time-compress", o.time_compress, "Real seconds per logical minute; 0 runs unpaced");
  cmd->add_option("--seed", o.seed, "Seed for within-minute spreading");
  cmd->add_option("--mock-capacity-gbps", o.mock_capacity, "Mock IDS capacity, e.g. 1 or 2.5");
  cmd->add_option("--mock-degradation", o.mock_degradation, "Mock detection loss per concurrent attack");
}

fs::path artifacts_root(const std::string& flag, const char* leaf) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("IDSBENCH_ARTIFACTS"); env && *env) return fs::path(env) / leaf;
  return fs::path("artifacts") / leaf;
}

ExpectationProfile load_priorities_or_default(const std::string& path) {
  return path.empty() ? parse_priorities(default_priorities_text()) : load_priorities(path);
}

MessageMapping load_mapping_or_default(const std::string& path) {
  return path.empty() ? parse_mapping(default_mapping_text()) : load_mapping(path);
}

DeploymentProfile resolve_profile(const RunOptions& o, const ExpectationProfile& priorities,
                                  const MessageMapping& mapping) {
  DeploymentProfile p = o.profile.empty() ? DeploymentProfile{} : load_profile(o.profile);
  if (o.time_compress) p.time_compress = *o.time_compress;
  if (o.seed) p.timeline_seed = *o.seed;
  if (o.mock_capacity) p.mock.capacity_gbps = parse_rational(*o.mock_capacity);
  if (o.mock_degradation) p.mock.detection_degradation = *o.mock_degradation;
  p.mock.detection_table = detection_table_from(priorities);
  p.mock.aliases = mapping;
  p.validate();
  return p;
}

/// Keeps the analysis inputs next to the raw outputs so `process` can be re-run alone.
void archive_inputs(const fs::path& dir, const RunOptions& o) {
  if (!o.priorities.empty()) fs::copy_file(o.priorities, dir / "priorities.txt", fs::copy_options::overwrite_existing);
  if (!o.mapping.empty()) fs::copy_file(o.mapping, dir / "mapping.txt", fs::copy_options::overwrite_existing);
}

void print_summary(std::ostream& out, const fs::path& dir, const SampleMetrics& m) {
  out << dir.string() << ": tp=" << m.tp << " fp=" << m.fp << " fn=" << m.fn << " tpr=" << format_ratio(m.tpr)
      << " precision=" << format_ratio(m.precision) << " far=" << format_ratio(m.far) << " dp=" << format_ratio(m.dp)
      << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::pair<Ipv4, int> parse_cidr(const std::string& s) {
  auto slash = s.find('/');
  auto ip = Ipv4::parse(s.substr(0, slash));
  if (!ip || slash == std::string::npos) throw ValidationError("pool must look like 10.9.0.0/16, got '" + s + "'");
  try {
    return {*ip, std::stoi(s.substr(slash + 1))};
  } catch (const std::exception&) {
    throw ValidationError("bad pool prefix in '" + s + "'");
  }
}

Ipv4 parse_ip(const std::string& s, const char* what) {
  auto ip = Ipv4::parse(s);
  if (!ip) throw ValidationError(std::string(what) + " is not an IPv4 address: '" + s + "'");
  return *ip;
}

int dispatch(CLI::App& app, std::ostream& out, std::ostream& err, const std::vector<std::string>& args) {
  bool dry_run = false;

  // prepare
  struct {
    std::string input, type, attacker, new_src, target, out, trace_id;
  } prep;
  auto* prepare = app.add_subcommand("prepare", "Strip responses and rewrite the source of one attack capture");
  prepare->add_option("--input", prep.input, "Raw capture (pcap)")->required();
  prepare->add_option("--type", prep.type, "Attack type")->required();
  prepare->add_option("--attacker", prep.attacker, "Attacker address in the raw capture")->required();
  prepare->add_option("--new-src", prep.new_src, "Source address to write")->required();
  prepare->add_option("--target", prep.target, "Victim address")->required();
  prepare->add_option("--out", prep.out, "Prepared trace (pcap)")->required();
  prepare->add_option("--trace-id", prep.trace_id, "Trace id (default: output file stem)");

  // plan-gen
  PlanGenOptions gen;
  std::string gen_bw = "1", gen_pool = "10.9.0.0/16", gen_out;
  auto* plan_gen = app.add_subcommand("plan-gen", "Generate an attack plan with equally likely attack types");
  plan_gen->add_option("--minutes", gen.minutes, "Test length in minutes")->capture_default_str();
  plan_gen->add_option("--apm", gen.attacks_per_minute, "Attacks per minute")->capture_default_str();
  plan_gen->add_option("--bandwidth", gen_bw, "Target bandwidth in Gbit/s")->capture_default_str();
  plan_gen->add_option("--ids", gen.ids_id, "IDS id")->capture_default_str();
  plan_gen->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  plan_gen->add_option("--pool", gen_pool, "Source address pool (CIDR)")->capture_default_str();
  plan_gen->add_option("--flood-threshold", gen.flood_alert_threshold, "Packets before a flood alerts")
      ->capture_default_str();
  plan_gen->add_option("--out", gen_out, "Plan file (stdout if omitted)");

  // run
  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Execute one test and process its artifacts");
  run->add_option("--plan", run_opts.plan, "Attack plan")->required();
  add_run_options(run, run_opts);

  // phase
  RunOptions phase_opts;
  std::vector<std::string> phase_plans;
  std::string phase_bws = "1,2,3,4,5,6,7", phase_apms = "10,15,20,25,30,35", phase_ids = "mock";
  int phase_minutes = 30;
  std::uint64_t phase_plan_seed = 1;
  auto* phase = app.add_subcommand("phase", "Run every sample of a test phase, then report");
  phase->add_option("--plan", phase_plans, "Plan file (repeatable); a bandwidth x attack-rate grid if omitted");
  phase->add_option("--bandwidths", phase_bws, "Grid bandwidths in Gbit/s")->capture_default_str();
  phase->add_option("--apms", phase_apms, "Grid attack rates")->capture_default_str();
  phase->add_option("--minutes", phase_minutes, "Grid test length")->capture_default_str();
  phase->add_option("--ids", phase_ids, "IDS id")->capture_default_str();
  phase->add_option("--plan-seed", phase_plan_seed, "Grid plan seed")->capture_default_str();
  add_run_options(phase, phase_opts);

  // process
  std::string process_dir, process_priorities, process_mapping;
  auto* process = app.add_subcommand("process", "Analyse an artifacts directory offline");
  process->add_option("dir", process_dir, "Artifacts directory")->required();
  process->add_option("--priorities", process_priorities, "Priority file (default: archived copy or built-in)");
  process->add_option("--mapping", process_mapping, "Mapping file (default: archived copy or built-in)");

  // report
  std::string report_dir, report_out;
  auto* report = app.add_subcommand("report", "Pool sample.json files below a directory into report CSVs");
  report->add_option("dir", report_dir, "Root to scan")->required();
  report->add_option("--out-dir", report_out, "Where to write the reports (default: the root)");

  for (auto* sub : {prepare, plan_gen, run, phase, process, report})
    sub->add_flag("--dry-run", dry_run, "Print the resolved configuration and stop");
  app.require_subcommand(1);

  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exitcode::kOk : exitcode::kValidation;
  }

  if (prepare->parsed()) {
    auto type = parse_attack_type(prep.type);
    if (!type) throw ValidationError("unknown attack type '" + prep.type + "'");
    const Ipv4 attacker = parse_ip(prep.attacker, "--attacker"), new_src = parse_ip(prep.new_src, "--new-src"),
               target = parse_ip(prep.target, "--target");
    const std::string id = prep.trace_id.empty() ? fs::path(prep.out).stem().string() : prep.trace_id;
    if (dry_run) {
      out << "prepare " << prep.input << " type=" << to_string(*type) << " attacker=" << attacker.to_string()
          << " new_src=" << new_src.to_string() << " target=" << target.to_string() << " trace_id=" << id
          << " out=" << prep.out << '\n';
      return exitcode::kOk;
    }
    if (!fs::exists(prep.input)) throw ValidationError("capture not found: " + prep.input);
    auto raw = read_capture(prep.input);
    auto trace = prepare_trace(raw, id, *type, attacker, new_src, target);
    write_trace(trace, prep.out);
    out << "packets before: " << raw.size() << ", after stripping: " << trace.packet_count() << '\n';
    return exitcode::kOk;
  }

  if (plan_gen->parsed()) {
    gen.bandwidth_gbps = parse_rational(gen_bw);
    std::tie(gen.pool_base, gen.pool_prefix) = parse_cidr(gen_pool);
    if (dry_run) {
      out << "plan-gen minutes=" << gen.minutes << " apm=" << gen.attacks_per_minute
          << " bandwidth=" << to_exact_string(gen.bandwidth_gbps) << " ids=" << gen.ids_id << " seed=" << gen.seed
          << " pool=" << gen_pool << " flood_threshold=" << gen.flood_alert_threshold
          << " out=" << (gen_out.empty() ? "-" : gen_out) << '\n';
      return exitcode::kOk;
    }
    const std::string text = serialize_plan(generate_plan(gen));
    if (gen_out.empty()) {
      out << text;
    } else {
      std::ofstream f(gen_out, std::ios::binary | std::ios::trunc);
      if (!f) throw InfrastructureError("cannot write " + gen_out);
      f << text;
    }
    return exitcode::kOk;
  }

  if (run->parsed()) {
    const auto priorities = load_priorities_or_default(run_opts.priorities);
    const auto mapping = load_mapping_or_default(run_opts.mapping);
    const auto profile = resolve_profile(run_opts, priorities, mapping);
    const auto plan = load_plan(run_opts.plan);
    const fs::path dir = artifacts_root(run_opts.out_dir, "run");
    if (dry_run) {
      out << "# run " << run_opts.plan << " -> " << dir.string() << '\n' << serialize_profile(profile);
      return exitcode::kOk;
    }
    auto ids = make_adapter(profile, plan.params.ids_id);
    run_test(profile, plan, *ids, dir);
    archive_inputs(dir, run_opts);
    print_summary(out, dir, process_artifacts(dir, priorities, mapping).metrics);
    return exitcode::kOk;
  }

  if (phase->parsed()) {
    const auto priorities = load_priorities_or_default(phase_opts.priorities);
    const auto mapping = load_mapping_or_default(phase_opts.mapping);
    const auto profile = resolve_profile(phase_opts, priorities, mapping);
    std::vector<AttackPlan> plans;
    if (!phase_plans.empty()) {
      for (auto& p : phase_plans) plans.push_back(load_plan(p));
    } else {
      std::vector<Rational> bws;
      std::vector<int> apms;
      for (auto& b : split_list(phase_bws)) bws.push_back(parse_rational(b));
      for (auto& a : split_list(phase_apms)) apms.push_back(static_cast<int>(to_double(parse_rational(a))));
      plans = make_grid(bws, apms, phase_minutes, phase_ids, phase_plan_seed);
    }
    const fs::path root = artifacts_root(phase_opts.out_dir, "phase");
    if (dry_run) {
      out << "# phase: " << plans.size() << " samples -> " << root.string() << '\n';
      for (auto& p : plans)
        out << "#   bw=" << to_exact_string(p.params.target_bandwidth_gbps) << " apm=" << p.params.attacks_per_minute
            << " minutes=" << p.params.duration_minutes << " ids=" << p.params.ids_id << '\n';
      out << serialize_profile(profile);
      return exitcode::kOk;
    }
    auto result = run_phase(
        profile, plans, [&](const AttackPlan& p) { return make_adapter(profile, p.params.ids_id); }, root);
    for (auto& raw : result.completed) {
      archive_inputs(raw.artifacts_dir, phase_opts);
      print_summary(out, raw.artifacts_dir, process_artifacts(raw.artifacts_dir, priorities, mapping).metrics);
    }
    if (!result.completed.empty()) write_grid_report(grid_report(collect_samples(root)), root);
    if (result.error) {
      err << "phase stopped after " << result.completed.size() << " of " << plans.size()
          << " samples: " << *result.error << '\n';
      return exitcode::kInfrastructure;
    }
    return exitcode::kOk;
  }

  if (process->parsed()) {
    const fs::path dir = process_dir;
    auto pick = [&](const std::string& flag, const char* archived) {
      if (!flag.empty()) return flag;
      return fs::exists(dir / archived) ? (dir / archived).string() : std::string();
    };
    const std::string pri = pick(process_priorities, "priorities.txt"), map = pick(process_mapping, "mapping.txt");
    if (dry_run) {
      out << "process " << dir.string() << " priorities=" << (pri.empty() ? "built-in" : pri)
          << " mapping=" << (map.empty() ? "built-in" : map) << '\n';
      return exitcode::kOk;
    }
    auto result = process_artifacts(dir, load_priorities_or_default(pri), load_mapping_or_default(map));
    for (auto& w : result.warnings) err << "warning: " << w << '\n';
    print_summary(out, dir, result.metrics);
    return exitcode::kOk;
  }

  if (report->parsed()) {
    const fs::path dest = report_out.empty() ? fs::path(report_dir) : fs::path(report_out);
    if (dry_run) {
      out << "report " << report_dir << " -> " << dest.string() << '\n';
      return exitcode::kOk;
    }
    auto samples = collect_samples(report_dir);
    write_grid_report(grid_report(samples), dest);
    out << samples.size() << " samples -> " << dest.string() << '\n';
    return exitcode::kOk;
  }
  return exitcode::kValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"IDS benchmark harness"};
  app.name("idsbench");
  try {
    return dispatch(app, out, err, args);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exitcode::kValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exitcode::kValidation;
  } catch (const InfrastructureError& e) {
    err << "infrastructure error: " << e.what() << '\n';
    return exitcode::kInfrastructure;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return exitcode::kRuntime;
  }
}

}  // namespace idsbench
