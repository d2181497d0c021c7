#include "forge/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "forge/error.hpp"
#include "forge/text.hpp"

namespace forge {

namespace {

constexpr std::string_view kModule = "ingest";

bool has_other_whitespace(std::string_view token) {
  return token.find_first_of("\t\r\v\f") != std::string_view::npos;
}

}  // namespace

std::vector<std::string> SplitLog::item_universe() const {
  std::vector<std::string> order;
  std::unordered_set<std::string> seen;
  auto visit = [&](const std::string& item) {
    if (seen.insert(item).second) order.push_back(item);
  };
  for (const auto& u : users)
    for (const auto& item : u.train_history) visit(item);
  for (const auto& u : users) {
    visit(u.val_target);
    visit(u.test_target);
  }
  return order;
}

InteractionLog parse_interactions(std::string_view text, std::string dataset_name) {
  if (!text::is_valid_utf8(text))
    throw Error(ErrorKind::InvalidUtf8, kModule, "input is not valid UTF-8");

  InteractionLog log;
  log.dataset_name = std::move(dataset_name);
  std::unordered_set<std::string_view> users_seen;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text)) {
    ++line_no;
    auto tokens = text::split_spaces(line);
    if (tokens.empty()) continue;
    for (std::string_view tok : tokens) {
      if (has_other_whitespace(tok))
        throw Error(ErrorKind::MalformedLine, kModule,
                    "line " + std::to_string(line_no) + ": tokens must be separated by spaces");
    }
    if (tokens.size() < 2)
      throw Error(ErrorKind::MalformedLine, kModule,
                  "line " + std::to_string(line_no) + ": user " + std::string(tokens[0]) +
                      " has no items");
    if (!users_seen.insert(tokens[0]).second)
      throw Error(ErrorKind::DuplicateUser, kModule,
                  "line " + std::to_string(line_no) + ": user " + std::string(tokens[0]) +
                      " appears twice");
    UserRecord rec;
    rec.raw_user_id = std::string(tokens[0]);
    rec.history.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) rec.history.emplace_back(tokens[i]);
    log.users.push_back(std::move(rec));
  }
  if (log.users.empty()) throw Error(ErrorKind::EmptyDataset, kModule, "no interaction lines");
  return log;
}

std::string format_interactions(const InteractionLog& log) {
  std::string out;
  for (const auto& u : log.users) {
    out += u.raw_user_id;
    for (const auto& item : u.history) {
      out += ' ';
      out += item;
    }
    out += '\n';
  }
  return out;
}

SplitLog split_leave_one_out(const InteractionLog& log) {
  SplitLog split;
  split.dataset_name = log.dataset_name;
  for (const auto& u : log.users) {
    if (u.history.size() < kMinHistory) {
      ++split.dropped_user_count;
      continue;
    }
    const std::size_t n = u.history.size();
    SplitUser su;
    su.raw_user_id = u.raw_user_id;
    su.train_history.assign(u.history.begin(), u.history.end() - 2);
    su.val_target = u.history[n - 2];
    su.test_target = u.history[n - 1];
    split.users.push_back(std::move(su));
  }
  if (split.users.empty())
    throw Error(ErrorKind::EmptySplit, kModule,
                "every user has fewer than " + std::to_string(kMinHistory) + " interactions");
  return split;
}

Stats dataset_stats(const InteractionLog& log) {
  Stats s;
  s.user_count = log.users.size();
  std::unordered_set<std::string_view> items;
  s.min_history = log.users.empty() ? 0 : log.users.front().history.size();
  for (const auto& u : log.users) {
    s.interaction_count += u.history.size();
    s.min_history = std::min(s.min_history, u.history.size());
    s.max_history = std::max(s.max_history, u.history.size());
    if (u.history.size() < kMinHistory) ++s.dropped_user_count;
    for (const auto& item : u.history) items.insert(item);
  }
  s.item_count = items.size();
  if (s.user_count > 0 && s.item_count > 0) {
    s.density = static_cast<double>(s.interaction_count) /
                (static_cast<double>(s.user_count) * static_cast<double>(s.item_count));
    s.mean_history = static_cast<double>(s.interaction_count) / static_cast<double>(s.user_count);
  }
  return s;
}

std::string format_stats(const Stats& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "users=%zu\nitems=%zu\ninteractions=%zu\ndropped_users=%zu\ndensity=%.6g\n"
                "min_history=%zu\nmax_history=%zu\nmean_history=%.4f\n",
                s.user_count, s.item_count, s.interaction_count, s.dropped_user_count, s.density,
                s.min_history, s.max_history, s.mean_history);
  return buf;
}

}  // namespace forge
