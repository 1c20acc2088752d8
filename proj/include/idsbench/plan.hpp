#pragma once

#include "idsbench/ipv4.hpp"
#include "idsbench/rational.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace idsbench {

/// The attack mix replayed during a test. Closed set; unknown names are rejected.
enum class AttackType {
  SshBruteForceSuccess,
  SshBruteForceFailure,
  TcpConnectFlood,
  TcpSynFlood,
  UdpFlood,
  SynScan,
  SynOsScan,
  UdpScan,
  UserEnumeration,
};

inline constexpr std::array<AttackType, 9> kAllAttackTypes = {
    AttackType::SshBruteForceSuccess, AttackType::SshBruteForceFailure,
    AttackType::TcpConnectFlood,      AttackType::TcpSynFlood,
    AttackType::UdpFlood,             AttackType::SynScan,
    AttackType::SynOsScan,            AttackType::UdpScan,
    AttackType::UserEnumeration,
};

std::string_view to_string(AttackType type);
std::optional<AttackType> parse_attack_type(std::string_view name);
bool is_flood(AttackType type);

inline constexpr int kDefaultFloodThreshold = 150;

struct TestParameters {
  int duration_minutes = 1;
  int attacks_per_minute = 1;
  Rational target_bandwidth_gbps{1};
  std::string ids_id = "mock";
  int flood_alert_threshold = kDefaultFloodThreshold;

  friend bool operator==(const TestParameters&, const TestParameters&) = default;
};

struct AttackInstance {
  AttackType type;
  std::string trace_id;
  Ipv4 source;

  friend bool operator==(const AttackInstance&, const AttackInstance&) = default;
};

/// Minute index (0-based, half-open [60m, 60(m+1)) seconds) to the attacks sent then.
using Schedule = std::map<int, std::vector<AttackInstance>>;

struct AttackPlan {
  TestParameters params;
  Schedule schedule;

  std::size_t attack_count() const;
  /// Instance with the given source address, and its minute.
  std::optional<std::pair<int, const AttackInstance*>> find_source(Ipv4 source) const;

  friend bool operator==(const AttackPlan&, const AttackPlan&) = default;
};

/// Checks every AttackPlan invariant. Throws ValidationError.
void validate(const AttackPlan& plan);

AttackPlan parse_plan(std::string_view text);
AttackPlan load_plan(const std::filesystem::path& path);
std::string serialize_plan(const AttackPlan& plan);

enum class Priority : std::uint8_t { Required = 0, Optional = 1 };

/// Signature text, or a prefix followed by a single trailing '*'.
class MessagePattern {
 public:
  MessagePattern() = default;
  explicit MessagePattern(std::string text);

  const std::string& text() const { return text_; }
  bool is_wildcard() const { return wildcard_; }
  bool matches(std::string_view message) const;

  friend bool operator==(const MessagePattern&, const MessagePattern&) = default;
  friend auto operator<=>(const MessagePattern& a, const MessagePattern& b) {
    return a.text_ <=> b.text_;
  }

 private:
  std::string text_;
  bool wildcard_ = false;
};

struct PriorityEntry {
  MessagePattern message;
  Priority priority = Priority::Required;

  friend bool operator==(const PriorityEntry&, const PriorityEntry&) = default;
};

struct ExpectationProfile {
  std::map<AttackType, std::vector<PriorityEntry>> entries;
  std::vector<std::string> warnings;

  const std::vector<PriorityEntry>& for_type(AttackType type) const;
  bool has_required(AttackType type) const;
};

ExpectationProfile parse_priorities(std::string_view text);
ExpectationProfile load_priorities(const std::filesystem::path& path);

/// Built-in profile covering all nine attack types.
std::string_view default_priorities_text();

/// Equivalence classes folding redundant signatures onto one canonical name.
class MessageMapping {
 public:
  /// Throws ValidationError when `member` already belongs to another class.
  void add(const std::string& canonical, const std::vector<std::string>& members);

  const std::string& canonicalize(const std::string& message) const;
  const std::map<std::string, std::vector<std::string>>& classes() const { return classes_; }
  bool empty() const { return classes_.empty(); }

 private:
  std::map<std::string, std::vector<std::string>> classes_;
  std::map<std::string, std::string> member_to_canonical_;
};

MessageMapping parse_mapping(std::string_view text);
MessageMapping load_mapping(const std::filesystem::path& path);

inline std::string canonicalize(const MessageMapping& mapping, const std::string& message) {
  return mapping.canonicalize(message);
}

std::string_view default_mapping_text();

/// Reads a whole file; ValidationError if it is missing.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace idsbench
