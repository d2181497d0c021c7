#include "forge/indexing.hpp"

#include <numeric>

#include "forge/error.hpp"
#include "forge/random.hpp"
#include "forge/text.hpp"

namespace forge {

namespace {

constexpr std::string_view kModule = "indexing";

// Splits "<CI1><I2>" into bracket tokens; empty result on malformed input.
std::vector<std::string> split_bracket_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != '<') return {};
    std::size_t close = s.find('>', pos + 1);
    if (close == std::string_view::npos || close == pos + 1) return {};
    std::string_view body = s.substr(pos + 1, close - pos - 1);
    if (body.find('<') != std::string_view::npos) return {};
    out.emplace_back(s.substr(pos, close - pos + 1));
    pos = close + 1;
  }
  return out;
}

bool valid_token(std::string_view tok) {
  if (tok.size() >= 3 && tok.front() == '<' && tok.back() == '>') return true;
  return (tok.size() == 1 || tok.size() == 2) && text::is_digits(tok);
}

IndexMap numeric_map(IndexMethod method, std::uint64_t start_id,
                     const std::vector<std::string>& items,
                     const std::vector<std::uint64_t>& offsets) {
  IndexMap map(method, start_id);
  for (std::size_t i = 0; i < items.size(); ++i)
    map.add(items[i], tokenize_number(std::to_string(start_id + offsets[i])));
  return map;
}

}  // namespace

std::string TokenSeq::joined() const {
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

std::string_view to_string(IndexMethod method) {
  switch (method) {
    case IndexMethod::Random: return "random";
    case IndexMethod::Sequential: return "sequential";
    case IndexMethod::Collaborative: return "collaborative";
  }
  return "unknown";
}

std::optional<IndexMethod> parse_index_method(std::string_view name) {
  if (name == "random") return IndexMethod::Random;
  if (name == "sequential") return IndexMethod::Sequential;
  if (name == "collaborative") return IndexMethod::Collaborative;
  return std::nullopt;
}

void IndexMap::add(std::string raw_id, TokenSeq tokens) {
  if (tokens.tokens.empty())
    throw Error(ErrorKind::MalformedIndexLine, kModule, "empty token sequence for " + raw_id);
  for (const auto& t : tokens.tokens)
    if (!valid_token(t))
      throw Error(ErrorKind::MalformedIndexLine, kModule, "invalid token '" + t + "'");
  if (by_raw_.contains(raw_id))
    throw Error(ErrorKind::DuplicateRawId, kModule, "raw id " + raw_id + " mapped twice");
  std::string joined = tokens.joined();
  if (by_joined_.contains(joined))
    throw Error(ErrorKind::NonBijectiveMap, kModule,
                "id " + joined + " assigned to both " + entries_[by_joined_.at(joined)].raw_id +
                    " and " + raw_id);
  by_raw_.emplace(raw_id, entries_.size());
  by_joined_.emplace(std::move(joined), entries_.size());
  entries_.push_back({std::move(raw_id), std::move(tokens)});
}

const TokenSeq* IndexMap::find(std::string_view raw_id) const {
  auto it = by_raw_.find(std::string(raw_id));
  return it == by_raw_.end() ? nullptr : &entries_[it->second].tokens;
}

const std::string* IndexMap::raw_for(std::string_view joined) const {
  auto it = by_joined_.find(std::string(joined));
  return it == by_joined_.end() ? nullptr : &entries_[it->second].raw_id;
}

std::optional<std::uint64_t> UserMap::find(std::string_view raw) const {
  auto it = index.find(std::string(raw));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

TokenSeq tokenize_number(std::string_view id) {
  if (!text::is_digits(id) || (id.size() > 1 && id.front() == '0'))
    throw Error(ErrorKind::NonNumericId, kModule, "'" + std::string(id) + "' is not a number");
  TokenSeq seq;
  for (std::size_t i = 0; i < id.size(); i += 2) seq.tokens.emplace_back(id.substr(i, 2));
  return seq;
}

IndexMap random_index(const SplitLog& split, std::uint64_t seed, std::uint64_t start_id) {
  const auto items = split.item_universe();
  std::vector<std::uint64_t> offsets(items.size());
  std::iota(offsets.begin(), offsets.end(), std::uint64_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::uint64_t>(offsets));
  return numeric_map(IndexMethod::Random, start_id, items, offsets);
}

IndexMap sequential_index(const SplitLog& split, std::uint64_t start_id) {
  // item_universe() already scans train histories first, then targets.
  const auto items = split.item_universe();
  std::vector<std::uint64_t> offsets(items.size());
  std::iota(offsets.begin(), offsets.end(), std::uint64_t{0});
  return numeric_map(IndexMethod::Sequential, start_id, items, offsets);
}

namespace {

template <typename Users>
UserMap reindex(const Users& users) {
  UserMap map;
  for (const auto& u : users) {
    map.index.emplace(u.raw_user_id, map.raw_ids.size() + 1);
    map.raw_ids.push_back(u.raw_user_id);
  }
  return map;
}

}  // namespace

UserMap reindex_users(const InteractionLog& log) { return reindex(log.users); }
UserMap reindex_users(const SplitLog& split) { return reindex(split.users); }

std::string write_index_map(const IndexMap& map) {
  std::string out;
  for (const auto& e : map.entries()) {
    out += e.raw_id;
    out += ' ';
    out += e.tokens.joined();
    out += '\n';
  }
  return out;
}

IndexMap read_index_map(std::string_view text) {
  // Provenance header, when present, carries the method and start id.
  IndexMethod method = IndexMethod::Sequential;
  std::uint64_t start_id = kDefaultStartId;
  bool method_known = false;
  bool start_known = false;
  for (std::string_view line : text::lines(text)) {
    if (!line.starts_with("# forge")) break;
    for (std::string_view field : text::split_spaces(line)) {
      if (field.starts_with("method=")) {
        if (auto m = parse_index_method(field.substr(7))) {
          method = *m;
          method_known = true;
        }
      } else if (field.starts_with("start_id=") && text::is_digits(field.substr(9))) {
        start_id = std::stoull(std::string(field.substr(9)));
        start_known = true;
      }
    }
  }

  IndexMap map;
  std::vector<std::pair<std::string, TokenSeq>> rows;
  bool any_bracket = false;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text::strip_provenance(text))) {
    ++line_no;
    auto fields = text::split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() != 2)
      throw Error(ErrorKind::MalformedIndexLine, kModule,
                  "line " + std::to_string(line_no) + ": expected '<raw_id> <id>'");
    TokenSeq seq;
    if (fields[1].front() == '<') {
      seq.tokens = split_bracket_tokens(fields[1]);
      any_bracket = true;
      if (seq.tokens.empty())
        throw Error(ErrorKind::MalformedIndexLine, kModule,
                    "line " + std::to_string(line_no) + ": bad bracket token sequence");
    } else {
      try {
        seq = tokenize_number(fields[1]);
      } catch (const Error&) {
        throw Error(ErrorKind::MalformedIndexLine, kModule,
                    "line " + std::to_string(line_no) + ": '" + std::string(fields[1]) +
                        "' is neither a number nor bracket tokens");
      }
    }
    rows.emplace_back(std::string(fields[0]), std::move(seq));
  }
  if (!method_known && any_bracket) method = IndexMethod::Collaborative;
  if (!start_known && method == IndexMethod::Collaborative) start_id = 0;
  map = IndexMap(method, start_id);
  for (auto& [raw, seq] : rows) map.add(std::move(raw), std::move(seq));
  return map;
}

std::string write_user_map(const UserMap& map) {
  std::string out;
  for (std::size_t i = 0; i < map.raw_ids.size(); ++i)
    out += map.raw_ids[i] + ' ' + std::to_string(i + 1) + '\n';
  return out;
}

UserMap read_user_map(std::string_view text) {
  UserMap map;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text::strip_provenance(text))) {
    ++line_no;
    auto fields = text::split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() != 2 || !text::is_digits(fields[1]) ||
        std::stoull(std::string(fields[1])) != map.raw_ids.size() + 1)
      throw Error(ErrorKind::MalformedLine, "indexing",
                  "user map line " + std::to_string(line_no) + " is not '<raw> <next index>'");
    map.index.emplace(std::string(fields[0]), map.raw_ids.size() + 1);
    map.raw_ids.emplace_back(fields[0]);
  }
  return map;
}

}  // namespace forge
