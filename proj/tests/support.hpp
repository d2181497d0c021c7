#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "forge/ingest.hpp"
#include "forge/random.hpp"

namespace forge::testing {

// Random log over items "1".."items" (numeric so item_id_less orders them by
// value). Every user has at least kMinHistory interactions.
inline InteractionLog random_log(Rng& rng, std::size_t users, std::size_t items, std::size_t min_len = 3,
                                 std::size_t max_len = 12, const std::string& prefix = "") {
  InteractionLog log;
  log.dataset_name = "Toy";
  for (std::size_t u = 0; u < users; ++u) {
    UserRecord rec;
    rec.raw_user_id = "u" + std::to_string(u);
    const std::size_t len = min_len + rng.below(max_len - min_len + 1);
    for (std::size_t t = 0; t < len; ++t) rec.history.push_back(prefix + std::to_string(1 + rng.below(items)));
    log.users.push_back(std::move(rec));
  }
  return log;
}

inline SplitLog random_split(Rng& rng, std::size_t users, std::size_t items, std::size_t min_len = 3,
                             std::size_t max_len = 12) {
  return split_leave_one_out(random_log(rng, users, items, min_len, max_len));
}

inline SplitUser make_user(std::string id, std::vector<std::string> train, std::string val, std::string test) {
  return SplitUser{std::move(id), std::move(train), std::move(val), std::move(test)};
}

}  // namespace forge::testing
