#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/ingest.hpp"

namespace forge {

/// Item (or user) identifier as a sequence of language tokens. Tokens are
/// either 1-2 digit strings or angle-bracket tokens such as "<CI3>".
struct TokenSeq {
  std::vector<std::string> tokens;

  /// Concatenation with no separator. Digit tokens concatenate back to the
  /// numeric ID; bracket tokens are self-delimiting.
  std::string joined() const;

  bool operator==(const TokenSeq&) const = default;
  auto operator<=>(const TokenSeq&) const = default;
};

enum class IndexMethod { Random, Sequential, Collaborative };

std::string_view to_string(IndexMethod method);
std::optional<IndexMethod> parse_index_method(std::string_view name);

inline constexpr std::uint64_t kDefaultStartId = 1001;

/// Bijection raw item ID -> TokenSeq. Entries keep insertion order, which is
/// also the order they are written in.
class IndexMap {
 public:
  struct Entry {
    std::string raw_id;
    TokenSeq tokens;
    bool operator==(const Entry&) const = default;
  };

  IndexMap() = default;
  IndexMap(IndexMethod method, std::uint64_t start_id) : method_(method), start_id_(start_id) {}

  /// Throws DuplicateRawId or NonBijectiveMap.
  void add(std::string raw_id, TokenSeq tokens);

  const TokenSeq* find(std::string_view raw_id) const;
  /// Reverse lookup by joined token string.
  const std::string* raw_for(std::string_view joined) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  IndexMethod method() const { return method_; }
  std::uint64_t start_id() const { return start_id_; }

  bool operator==(const IndexMap& other) const {
    return method_ == other.method_ && start_id_ == other.start_id_ && entries_ == other.entries_;
  }

 private:
  IndexMethod method_ = IndexMethod::Sequential;
  std::uint64_t start_id_ = kDefaultStartId;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> by_raw_;
  std::unordered_map<std::string, std::size_t> by_joined_;
};

/// Raw user ID -> 1..user_count in file order.
struct UserMap {
  std::vector<std::string> raw_ids;  // raw_ids[i] has index i + 1
  std::unordered_map<std::string, std::uint64_t> index;

  std::optional<std::uint64_t> find(std::string_view raw) const;
};

/// Left-to-right digit pairs; an odd-length ID ends in a single digit.
/// "2048" -> ["20", "48"], "123" -> ["12", "3"].
TokenSeq tokenize_number(std::string_view id);

IndexMap random_index(const SplitLog& split, std::uint64_t seed,
                      std::uint64_t start_id = kDefaultStartId);

/// Consecutive IDs in order of first appearance in the training histories;
/// items seen only as val/test targets are numbered afterwards.
IndexMap sequential_index(const SplitLog& split, std::uint64_t start_id = kDefaultStartId);

UserMap reindex_users(const InteractionLog& log);
UserMap reindex_users(const SplitLog& split);

std::string write_index_map(const IndexMap& map);
IndexMap read_index_map(std::string_view text);

std::string write_user_map(const UserMap& map);
UserMap read_user_map(std::string_view text);

}  // namespace forge
