#include "forge/error.hpp"

namespace forge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::DuplicateUser: return "DuplicateUser";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::InvalidUtf8: return "InvalidUtf8";
    case ErrorKind::NonNumericId: return "NonNumericId";
    case ErrorKind::MalformedIndexLine: return "MalformedIndexLine";
    case ErrorKind::DuplicateRawId: return "DuplicateRawId";
    case ErrorKind::NonBijectiveMap: return "NonBijectiveMap";
    case ErrorKind::TooFewNodes: return "TooFewNodes";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::BadFieldCount: return "BadFieldCount";
    case ErrorKind::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorKind::UnknownTask: return "UnknownTask";
    case ErrorKind::UnknownExposure: return "UnknownExposure";
    case ErrorKind::InvalidTemplate: return "InvalidTemplate";
    case ErrorKind::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorKind::MissingIndexEntry: return "MissingIndexEntry";
    case ErrorKind::MixedPhase: return "MixedPhase";
    case ErrorKind::EmptyPlan: return "EmptyPlan";
    case ErrorKind::PrefixCollision: return "PrefixCollision";
    case ErrorKind::EmptyMap: return "EmptyMap";
    case ErrorKind::DuplicateQuery: return "DuplicateQuery";
    case ErrorKind::DuplicateItemInList: return "DuplicateItemInList";
    case ErrorKind::NoQueries: return "NoQueries";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string_view module, const std::string& detail)
    : std::runtime_error(std::string(module) + ": " + detail + " [" +
                         std::string(to_string(kind)) + "]"),
      kind_(kind) {}

}  // namespace forge
