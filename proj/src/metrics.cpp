#include "idsbench/metrics.hpp"

#include "idsbench/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace idsbench {

using nlohmann::json;

void SampleKey::validate() const {
  if (bandwidth_gbps <= 0) throw ValidationError("sample bandwidth must be > 0");
  if (attacks_per_minute < 1) throw ValidationError("attacks per minute must be >= 1");
}

Ratio ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return Rational(num, den);
}

std::string format_ratio(const Ratio& r, int digits) { return r ? to_decimal(*r, digits) : "undefined"; }

namespace {

void finalize(SampleMetrics& m) {
  m.tpr = ratio(m.tp, m.tp + m.fn);
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.far = ratio(m.fp, m.tp + m.fp);
  const auto& t = m.totals;
  m.dp = ratio(t.dropped, t.received + t.dropped);
  m.rp = t.elapsed > 0 ? static_cast<double>(t.received) / t.elapsed : 0.0;
  if (t.sent) {
    m.sp = t.elapsed > 0 ? static_cast<double>(*t.sent) / t.elapsed : 0.0;
    m.unconsidered = *t.sent - t.received;
  } else {
    m.sp.reset();
    m.unconsidered.reset();
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string report_row(const std::string& key, const SampleMetrics& m) {
  return key + ',' + std::to_string(m.tp) + ',' + std::to_string(m.fp) + ',' + std::to_string(m.fn) + ',' +
         format_ratio(m.tpr) + ',' + format_ratio(m.precision) + ',' + format_ratio(m.far) + ',' +
         fmt("%.6f", m.cpu_avg) + ',' + fmt("%.0f", m.memory_avg) + ',' + fmt("%.3f", m.rp) + ',' +
         format_ratio(m.dp) + ',' + (m.sp ? fmt("%.3f", *m.sp) : "undefined") + ',' +
         (m.unconsidered ? std::to_string(*m.unconsidered) : "undefined") + '\n';
}

json ratio_json(const Ratio& r) { return r ? json(to_exact_string(*r)) : json(nullptr); }

Ratio ratio_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_rational(j.get<std::string>());
}

}  // namespace

SampleMetrics compute_sample(const SampleKey& key, const DetectionCounts& counts, const ResourceSummary& resources,
                             const PacketTotals& totals) {
  if (counts.tp < 0 || counts.fp < 0 || counts.fn < 0) throw ValidationError("detection counts must be >= 0");
  SampleMetrics m;
  m.key = key;
  m.tp = counts.tp;
  m.fp = counts.fp;
  m.fn = counts.fn;
  m.cpu_avg = resources.cpu_avg;
  m.memory_avg = resources.memory_avg;
  m.resource_samples = resources.sample_count;
  m.totals = totals;
  m.tests = 1;
  finalize(m);
  return m;
}

SampleMetrics pool(const std::vector<SampleMetrics>& tests, const SampleKey& key) {
  if (tests.empty()) throw ValidationError("nothing to aggregate");
  if (tests.size() == 1) {
    SampleMetrics m = tests.front();
    m.key = key;
    return m;
  }
  SampleMetrics m;
  m.key = key;
  m.tests = 0;
  double cpu_weighted = 0, mem_weighted = 0;
  bool all_sent = true;
  std::int64_t sent = 0;
  for (auto& t : tests) {
    m.tp += t.tp;
    m.fp += t.fp;
    m.fn += t.fn;
    m.totals.received += t.totals.received;
    m.totals.dropped += t.totals.dropped;
    m.totals.elapsed += t.totals.elapsed;
    if (t.totals.sent) sent += *t.totals.sent;
    else all_sent = false;
    cpu_weighted += t.cpu_avg * static_cast<double>(t.resource_samples);
    mem_weighted += t.memory_avg * static_cast<double>(t.resource_samples);
    m.resource_samples += t.resource_samples;
    m.tests += t.tests;
  }
  if (all_sent) m.totals.sent = sent;
  if (m.resource_samples > 0) {
    m.cpu_avg = cpu_weighted / static_cast<double>(m.resource_samples);
    m.memory_avg = mem_weighted / static_cast<double>(m.resource_samples);
  }
  finalize(m);
  return m;
}

SampleMetrics aggregate(const std::vector<SampleMetrics>& tests) {
  if (tests.empty()) throw ValidationError("nothing to aggregate");
  for (auto& t : tests)
    if (!(t.key == tests.front().key)) throw ValidationError("cannot aggregate tests of different samples");
  return pool(tests, tests.front().key);
}

GridReport grid_report(const std::map<SampleKey, SampleMetrics>& samples) {
  const std::string header = std::string(kReportHeader) + '\n';
  GridReport r{header, header, header};
  std::map<std::pair<std::string, Rational>, std::vector<SampleMetrics>> by_bw;
  std::map<std::pair<std::string, int>, std::vector<SampleMetrics>> by_apm;
  for (auto& [key, m] : samples) {
    r.grid_csv += report_row(key.ids_id + '/' + to_exact_string(key.bandwidth_gbps) + '/' +
                                 std::to_string(key.attacks_per_minute),
                             m);
    by_bw[{key.ids_id, key.bandwidth_gbps}].push_back(m);
    by_apm[{key.ids_id, key.attacks_per_minute}].push_back(m);
  }
  for (auto& [k, list] : by_bw)
    r.bandwidth_csv += report_row(k.first + '/' + to_exact_string(k.second), pool(list, list.front().key));
  for (auto& [k, list] : by_apm)
    r.attacks_csv += report_row(k.first + '/' + std::to_string(k.second), pool(list, list.front().key));
  return r;
}

void write_grid_report(const GridReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw InfrastructureError("cannot write " + (dir / name).string());
    out << text;
  };
  put("report_bandwidth.csv", report.bandwidth_csv);
  put("report_attacks.csv", report.attacks_csv);
  put("report_grid.csv", report.grid_csv);
}

std::string to_json(const SampleMetrics& m) {
  json j;
  j["key"] = {{"bandwidth_gbps", to_exact_string(m.key.bandwidth_gbps)},
              {"attacks_per_minute", m.key.attacks_per_minute},
              {"ids", m.key.ids_id}};
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["tpr"] = ratio_json(m.tpr);
  j["precision"] = ratio_json(m.precision);
  j["far"] = ratio_json(m.far);
  j["cpu_avg"] = m.cpu_avg;
  j["memory_avg"] = m.memory_avg;
  j["rp"] = m.rp;
  j["dp"] = ratio_json(m.dp);
  j["sp"] = m.sp ? json(*m.sp) : json(nullptr);
  j["unconsidered"] = m.unconsidered ? json(*m.unconsidered) : json(nullptr);
  j["support"] = {{"received", m.totals.received},
                  {"dropped", m.totals.dropped},
                  {"sent", m.totals.sent ? json(*m.totals.sent) : json(nullptr)},
                  {"elapsed", m.totals.elapsed},
                  {"resource_samples", m.resource_samples},
                  {"tests", m.tests}};
  return j.dump(2) + '\n';
}

SampleMetrics sample_from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    SampleMetrics m;
    m.key.bandwidth_gbps = parse_rational(j.at("key").at("bandwidth_gbps").get<std::string>());
    m.key.attacks_per_minute = j.at("key").at("attacks_per_minute").get<int>();
    m.key.ids_id = j.at("key").at("ids").get<std::string>();
    m.tp = j.at("tp").get<std::int64_t>();
    m.fp = j.at("fp").get<std::int64_t>();
    m.fn = j.at("fn").get<std::int64_t>();
    m.cpu_avg = j.at("cpu_avg").get<double>();
    m.memory_avg = j.at("memory_avg").get<double>();
    auto& s = j.at("support");
    m.totals.received = s.at("received").get<std::int64_t>();
    m.totals.dropped = s.at("dropped").get<std::int64_t>();
    if (!s.at("sent").is_null()) m.totals.sent = s.at("sent").get<std::int64_t>();
    m.totals.elapsed = s.at("elapsed").get<double>();
    m.resource_samples = s.at("resource_samples").get<std::size_t>();
    m.tests = s.at("tests").get<std::size_t>();
    finalize(m);
    // the stored ratios must agree with the support they came from
    if (m.tpr != ratio_from(j.at("tpr")) || m.precision != ratio_from(j.at("precision")) ||
        m.far != ratio_from(j.at("far")) || m.dp != ratio_from(j.at("dp")))
      throw ParseError("sample ratios disagree with their counts");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad sample json: ") + e.what());
  }
}

}  // namespace idsbench
