#pragma once

#include "idsbench/adapters.hpp"
#include "idsbench/plan.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace idsbench {

/// One message an attack instance is expected to raise in its minute.
struct Expectation {
  int minute = 0;
  AttackInstance instance;
  std::string message;  ///< canonical pattern text (may end in '*')
  Priority priority = Priority::Required;
  int expected_count = 1;
};

/// One Expectation per (instance, profile entry), in schedule order then profile order.
/// Throws ValidationError when an attack type has no profile entry.
std::vector<Expectation> expand_expectations(const AttackPlan& plan, const ExpectationProfile& profile,
                                             const MessageMapping& mapping);

namespace rowflag {
inline constexpr unsigned kLate = 1;   ///< alert came in the minute after its attack
inline constexpr unsigned kEarly = 2;  ///< ... or in the minute before
}  // namespace rowflag

struct RowKey {
  int minute = 0;
  std::string message;

  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

struct MatchRow {
  std::int64_t logged = 0;
  std::int64_t expected_required = 0;
  std::int64_t expected_optional = 0;
  unsigned flags = 0;

  std::int64_t expected() const { return expected_required + expected_optional; }
};

struct MatchTable {
  std::map<RowKey, MatchRow> rows;
  std::vector<AlertRecord> unattributed;

  std::int64_t logged_total() const;
};

/// Canonicalizes and attributes alerts by source address to their planned minute
/// (adjacent minutes allowed and flagged). Rows carry logged counts only.
MatchTable attribute(const std::vector<AlertRecord>& alerts, const AttackPlan& plan, const MessageMapping& mapping);

/// Folds expectations into an attributed table: logged messages move onto the row of the
/// first expectation pattern in their minute that matches them.
MatchTable apply_expectations(const MatchTable& attributed, const std::vector<Expectation>& expectations);

struct DetectionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  DetectionCounts& operator+=(const DetectionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const DetectionCounts&, const DetectionCounts&) = default;
};

/// Required expectations are filled first, optional ones absorb the surplus without counting
/// either way, anything beyond both (and every unattributed alert) is a false positive.
DetectionCounts count_matches(const MatchTable& table, const std::vector<Expectation>& expectations);

/// `minute,message,logged,expected,priority,flags`
std::string to_csv(const MatchTable& table);
/// `t,message,src,dst`
std::string unattributed_csv(const MatchTable& table);

/// Double-quotes a CSV field when it needs it.
std::string csv_field(const std::string& value);

}  // namespace idsbench
