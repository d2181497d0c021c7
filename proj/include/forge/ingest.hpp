#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

struct UserRecord {
  std::string raw_user_id;
  std::vector<std::string> history;  // chronological

  bool operator==(const UserRecord&) const = default;
};

struct InteractionLog {
  std::string dataset_name;
  std::vector<UserRecord> users;  // file line order

  bool operator==(const InteractionLog&) const = default;
};

struct SplitUser {
  std::string raw_user_id;
  std::vector<std::string> train_history;
  std::string val_target;
  std::string test_target;

  bool operator==(const SplitUser&) const = default;
};

struct SplitLog {
  std::string dataset_name;
  std::vector<SplitUser> users;
  std::size_t dropped_user_count = 0;

  bool operator==(const SplitLog&) const = default;

  /// Distinct items in first-appearance order: every train history scanned
  /// in user order, then each user's val target followed by its test target.
  std::vector<std::string> item_universe() const;
};

struct Stats {
  std::size_t user_count = 0;
  std::size_t item_count = 0;
  std::size_t interaction_count = 0;
  std::size_t dropped_user_count = 0;  // users with fewer than kMinHistory items
  double density = 0.0;
  std::size_t min_history = 0;
  std::size_t max_history = 0;
  double mean_history = 0.0;
};

inline constexpr std::size_t kMinHistory = 3;

/// Parses the line-per-user format: `<user> <item> <item> ...`, single or
/// repeated ASCII spaces between tokens. Blank lines are skipped.
InteractionLog parse_interactions(std::string_view text, std::string dataset_name);

/// Inverse of parse_interactions with single-space separators.
std::string format_interactions(const InteractionLog& log);

/// Leave-one-out: last item is the test target, second-to-last the
/// validation target. Users with fewer than kMinHistory items are dropped.
SplitLog split_leave_one_out(const InteractionLog& log);

Stats dataset_stats(const InteractionLog& log);

std::string format_stats(const Stats& stats);

}  // namespace forge
