#include "clonevet/error.hpp"

namespace clonevet {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::UnterminatedComment: return "UnterminatedComment";
    case ErrorCode::InvalidCharacter: return "InvalidCharacter";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::NoMatchingMethod: return "NoMatchingMethod";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::NoVotes: return "NoVotes";
    case ErrorCode::IncompleteExperiment: return "IncompleteExperiment";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ModelUnavailable: return "ModelUnavailable";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::UnknownJudge: return "UnknownJudge";
    case ErrorCode::IllegalCloneType: return "IllegalCloneType";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::MalformedCSV: return "MalformedCSV";
    case ErrorCode::UnknownTool: return "UnknownTool";
    case ErrorCode::DuplicateTool: return "DuplicateTool";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::EmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::UnregisteredUser: return "UnregisteredUser";
    case ErrorCode::ExperimentComplete: return "ExperimentComplete";
    case ErrorCode::TaskNotFound: return "TaskNotFound";
    case ErrorCode::NotComplete: return "NotComplete";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::MissingVerdict: return "MissingVerdict";
    case ErrorCode::StorageError: return "StorageError";
  }
  return "Unknown";
}

}  // namespace clonevet
