#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forge {

enum class ErrorKind {
  // ingest
  MalformedLine,
  DuplicateUser,
  EmptyDataset,
  EmptySplit,
  InvalidUtf8,
  // indexing
  NonNumericId,
  MalformedIndexLine,
  DuplicateRawId,
  NonBijectiveMap,
  // collab
  TooFewNodes,
  NonConvergence,
  InvalidConfig,
  // prompts
  BadFieldCount,
  UnknownPlaceholder,
  UnknownTask,
  UnknownExposure,
  InvalidTemplate,
  UnboundPlaceholder,
  MissingIndexEntry,
  MixedPhase,
  // scheduler
  EmptyPlan,
  // genrec
  PrefixCollision,
  EmptyMap,
  // eval
  DuplicateQuery,
  DuplicateItemInList,
  NoQueries,
  // io
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Data error raised by any pipeline module. The message is prefixed with
/// the module name, e.g. "ingest: line 3: user has no items".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace forge
