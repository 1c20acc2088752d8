#include "idsbench/plan.hpp"

#include "idsbench/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace idsbench {
namespace {

constexpr std::array<std::pair<AttackType, std::string_view>, 9> kNames = {{
    {AttackType::SshBruteForceSuccess, "ssh_bruteforce_success"},
    {AttackType::SshBruteForceFailure, "ssh_bruteforce_failure"},
    {AttackType::TcpConnectFlood, "tcp_connect_flood"},
    {AttackType::TcpSynFlood, "tcp_syn_flood"},
    {AttackType::UdpFlood, "udp_flood"},
    {AttackType::SynScan, "syn_scan"},
    {AttackType::SynOsScan, "syn_os_scan"},
    {AttackType::UdpScan, "udp_scan"},
    {AttackType::UserEnumeration, "user_enumeration"},
}};

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view line) {
  return trim(line.substr(0, line.find('#')));
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + sep.size();
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    fn(number, text.substr(start, end - start));
    start = end + 1;
  }
}

std::string at_line(int n) { return "line " + std::to_string(n) + ": "; }

int parse_int_field(std::string_view v, int line, std::string_view what) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ParseError(at_line(line) + "invalid " + std::string(what) + " '" + std::string(v) + "'");
  return out;
}

}  // namespace

std::string_view to_string(AttackType type) {
  for (auto& [t, name] : kNames)
    if (t == type) return name;
  return "unknown";
}

std::optional<AttackType> parse_attack_type(std::string_view name) {
  for (auto& [t, n] : kNames)
    if (n == name) return t;
  return std::nullopt;
}

bool is_flood(AttackType type) {
  return type == AttackType::TcpConnectFlood || type == AttackType::TcpSynFlood ||
         type == AttackType::UdpFlood;
}

std::size_t AttackPlan::attack_count() const {
  std::size_t n = 0;
  for (auto& [minute, attacks] : schedule) n += attacks.size();
  return n;
}

std::optional<std::pair<int, const AttackInstance*>> AttackPlan::find_source(Ipv4 source) const {
  for (auto& [minute, attacks] : schedule)
    for (auto& a : attacks)
      if (a.source == source) return std::pair{minute, &a};
  return std::nullopt;
}

void validate(const AttackPlan& plan) {
  const auto& p = plan.params;
  if (p.duration_minutes < 1) throw ValidationError("M must be >= 1");
  if (p.attacks_per_minute < 1) throw ValidationError("APM must be >= 1");
  if (p.target_bandwidth_gbps <= 0) throw ValidationError("BW_GBPS must be > 0");
  if (p.flood_alert_threshold < 1) throw ValidationError("FLOOD_THRESHOLD must be >= 1");
  if (p.ids_id.empty()) throw ValidationError("IDS must be set");
  std::unordered_set<Ipv4> sources;
  for (auto& [minute, attacks] : plan.schedule) {
    if (minute < 0 || minute >= p.duration_minutes)
      throw ValidationError("minute " + std::to_string(minute) + " outside [0, " +
                            std::to_string(p.duration_minutes) + ")");
    if (static_cast<int>(attacks.size()) != p.attacks_per_minute)
      throw ValidationError("minute " + std::to_string(minute) + " has " +
                            std::to_string(attacks.size()) + " attacks, APM is " +
                            std::to_string(p.attacks_per_minute));
    for (auto& a : attacks) {
      if (!sources.insert(a.source).second)
        throw ValidationError("duplicate source address " + a.source.to_string());
    }
  }
}

AttackPlan parse_plan(std::string_view text) {
  AttackPlan plan;
  bool have_m = false, have_apm = false, have_bw = false, have_ids = false;
  std::unordered_map<Ipv4, int> source_line;
  std::map<int, int> first_line_of_minute;

  for_each_line(text, [&](int n, std::string_view raw) {
    auto line = strip_comment(raw);
    if (line.empty()) return;
    if (auto eq = line.find('='); eq != std::string_view::npos) {
      auto key = trim(line.substr(0, eq));
      auto value = trim(line.substr(eq + 1));
      if (key == "M") {
        plan.params.duration_minutes = parse_int_field(value, n, "M");
        have_m = true;
      } else if (key == "APM") {
        plan.params.attacks_per_minute = parse_int_field(value, n, "APM");
        have_apm = true;
      } else if (key == "BW_GBPS") {
        try {
          plan.params.target_bandwidth_gbps = parse_rational(value);
        } catch (const ParseError& e) {
          throw ParseError(at_line(n) + e.what());
        }
        have_bw = true;
      } else if (key == "IDS") {
        plan.params.ids_id = std::string(value);
        have_ids = true;
      } else if (key == "FLOOD_THRESHOLD") {
        plan.params.flood_alert_threshold = parse_int_field(value, n, "FLOOD_THRESHOLD");
      } else {
        throw ParseError(at_line(n) + "unknown header '" + std::string(key) + "'");
      }
      return;
    }
    auto fields = split_ws(line);
    if (fields.size() != 4)
      throw ParseError(at_line(n) + "expected '<minute> <attack_type> <trace_id> <source_ipv4>'");
    int minute = parse_int_field(fields[0], n, "minute");
    auto type = parse_attack_type(fields[1]);
    if (!type) throw ValidationError(at_line(n) + "unknown attack type '" + std::string(fields[1]) + "'");
    auto source = Ipv4::parse(fields[3]);
    if (!source) throw ParseError(at_line(n) + "invalid IPv4 address '" + std::string(fields[3]) + "'");
    if (auto [it, inserted] = source_line.emplace(*source, n); !inserted)
      throw ValidationError(at_line(n) + "duplicate source address " + source->to_string() +
                            " (first used on line " + std::to_string(it->second) + ")");
    if (minute < 0 || (have_m && minute >= plan.params.duration_minutes))
      throw ValidationError(at_line(n) + "minute " + std::to_string(minute) + " outside [0, M)");
    first_line_of_minute.emplace(minute, n);
    plan.schedule[minute].push_back({*type, std::string(fields[2]), *source});
  });

  if (!have_m || !have_apm || !have_bw || !have_ids)
    throw ParseError("plan header requires M, APM, BW_GBPS and IDS");
  // headers may follow attack lines; re-check what depended on them
  for (auto& [minute, attacks] : plan.schedule) {
    if (minute >= plan.params.duration_minutes)
      throw ValidationError(at_line(first_line_of_minute[minute]) + "minute " +
                            std::to_string(minute) + " outside [0, M)");
    if (static_cast<int>(attacks.size()) != plan.params.attacks_per_minute)
      throw ValidationError(at_line(first_line_of_minute[minute]) + "minute " +
                            std::to_string(minute) + " has " + std::to_string(attacks.size()) +
                            " attacks, APM is " + std::to_string(plan.params.attacks_per_minute));
  }
  validate(plan);
  return plan;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AttackPlan load_plan(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  try {
    return parse_plan(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_plan(const AttackPlan& plan) {
  std::ostringstream out;
  out << "M=" << plan.params.duration_minutes << '\n'
      << "APM=" << plan.params.attacks_per_minute << '\n'
      << "BW_GBPS=" << to_exact_string(plan.params.target_bandwidth_gbps) << '\n'
      << "IDS=" << plan.params.ids_id << '\n'
      << "FLOOD_THRESHOLD=" << plan.params.flood_alert_threshold << '\n';
  for (auto& [minute, attacks] : plan.schedule)
    for (auto& a : attacks)
      out << minute << ' ' << to_string(a.type) << ' ' << a.trace_id << ' '
          << a.source.to_string() << '\n';
  return out.str();
}

MessagePattern::MessagePattern(std::string text) : text_(std::move(text)) {
  auto star = text_.find('*');
  if (star != std::string::npos) {
    if (star != text_.size() - 1)
      throw ValidationError("pattern '" + text_ + "': '*' is only allowed as the last character");
    wildcard_ = true;
  }
}

bool MessagePattern::matches(std::string_view message) const {
  if (!wildcard_) return message == text_;
  std::string_view prefix(text_.data(), text_.size() - 1);
  return message.substr(0, prefix.size()) == prefix;
}

const std::vector<PriorityEntry>& ExpectationProfile::for_type(AttackType type) const {
  static const std::vector<PriorityEntry> kEmpty;
  auto it = entries.find(type);
  return it == entries.end() ? kEmpty : it->second;
}

bool ExpectationProfile::has_required(AttackType type) const {
  auto& list = for_type(type);
  return std::any_of(list.begin(), list.end(),
                     [](const PriorityEntry& e) { return e.priority == Priority::Required; });
}

ExpectationProfile parse_priorities(std::string_view text) {
  ExpectationProfile profile;
  for_each_line(text, [&](int n, std::string_view raw) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    auto fields = split_on(line, "|");
    if (fields.size() != 3)
      throw ParseError(at_line(n) + "expected '<attack_type> | <priority 0|1> | <message_pattern>'");
    auto type = parse_attack_type(fields[0]);
    if (!type) throw ValidationError(at_line(n) + "unknown attack type '" + std::string(fields[0]) + "'");
    Priority priority;
    if (fields[1] == "0")
      priority = Priority::Required;
    else if (fields[1] == "1")
      priority = Priority::Optional;
    else
      throw ValidationError(at_line(n) + "invalid priority '" + std::string(fields[1]) + "', expected 0 or 1");
    if (fields[2].empty()) throw ParseError(at_line(n) + "empty message pattern");
    try {
      profile.entries[*type].push_back({MessagePattern(std::string(fields[2])), priority});
    } catch (const ValidationError& e) {
      throw ValidationError(at_line(n) + e.what());
    }
  });
  for (auto type : kAllAttackTypes) {
    if (!profile.entries.contains(type)) {
      profile.entries[type] = {};
      profile.warnings.push_back("no priority entries for " + std::string(to_string(type)));
    } else if (!profile.has_required(type)) {
      profile.warnings.push_back("no required (priority 0) entry for " + std::string(to_string(type)));
    }
  }
  return profile;
}

ExpectationProfile load_priorities(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  try {
    return parse_priorities(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string_view default_priorities_text() {
  return R"(# attack_type | priority | message pattern
ssh_bruteforce_success | 0 | ET SCAN Potential SSH Scan
ssh_bruteforce_success | 1 | ET INFO NetSSH SSH Version String Hardcoded in Metasploit
ssh_bruteforce_success | 0 | ET POLICY SSH Login After Repeated Failures
ssh_bruteforce_failure | 0 | ET SCAN Potential SSH Scan
ssh_bruteforce_failure | 1 | ET INFO NetSSH SSH Version String Hardcoded in Metasploit
tcp_connect_flood | 0 | ET DOS Possible TCP Connect Flood
tcp_syn_flood | 0 | ET DOS Possible SYN Flood
udp_flood | 0 | ET DOS Possible UDP Flood
syn_scan | 0 | TCPScan
syn_os_scan | 0 | ET SCAN NMAP OS Detection Probe
syn_os_scan | 1 | TCPScan
udp_scan | 0 | UDPScan
user_enumeration | 0 | ET SCAN Possible SSH User Enumeration*
)";
}

void MessageMapping::add(const std::string& canonical, const std::vector<std::string>& members) {
  if (canonical.empty()) throw ValidationError("empty canonical name");
  if (auto it = member_to_canonical_.find(canonical);
      it != member_to_canonical_.end() && it->second != canonical)
    throw ValidationError("canonical name '" + canonical + "' is a member of class '" +
                          it->second + "'");
  for (auto& m : members) {
    if (m.empty()) throw ValidationError("empty member in class '" + canonical + "'");
    auto [it, inserted] = member_to_canonical_.emplace(m, canonical);
    if (!inserted && it->second != canonical)
      throw ValidationError("member '" + m + "' appears in classes '" + it->second + "' and '" +
                            canonical + "'");
    if (!inserted) continue;
    if (classes_.contains(m) && m != canonical)
      throw ValidationError("member '" + m + "' is itself a canonical name");
    classes_[canonical].push_back(m);
  }
  classes_.try_emplace(canonical);
}

const std::string& MessageMapping::canonicalize(const std::string& message) const {
  auto it = member_to_canonical_.find(message);
  return it == member_to_canonical_.end() ? message : it->second;
}

MessageMapping parse_mapping(std::string_view text) {
  MessageMapping mapping;
  for_each_line(text, [&](int n, std::string_view raw) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    auto arrow = line.find("<=");
    if (arrow == std::string_view::npos)
      throw ParseError(at_line(n) + "expected '<canonical> <= <member1>, <member2>, ...'");
    auto canonical = trim(line.substr(0, arrow));
    if (canonical.empty()) throw ParseError(at_line(n) + "empty canonical name");
    std::vector<std::string> members;
    for (auto m : split_on(line.substr(arrow + 2), ",")) {
      if (m.empty()) throw ParseError(at_line(n) + "empty member");
      members.emplace_back(m);
    }
    try {
      mapping.add(std::string(canonical), members);
    } catch (const ValidationError& e) {
      throw ValidationError(at_line(n) + e.what());
    }
  });
  return mapping;
}

MessageMapping load_mapping(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  try {
    return parse_mapping(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string_view default_mapping_text() {
  return "TCPScan <= TCPFilteredScan, TCPScan\n"
         "UDPScan <= UDPFilteredScan, UDPScan\n";
}

}  // namespace idsbench
