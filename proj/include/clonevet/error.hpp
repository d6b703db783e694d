#pragma once

#include <stdexcept>
#include <string>

namespace clonevet {

/// Every failure raised by the library carries one of these codes so that
/// callers (the pipeline, the service, the CLI) can route on it without
/// string matching.
enum class ErrorCode {
  UnterminatedString,
  UnterminatedComment,
  InvalidCharacter,
  ParseError,
  FileNotFound,
  NoMatchingMethod,
  InvalidThreshold,
  InvalidParameter,
  InsufficientPairs,
  NoVotes,
  IncompleteExperiment,
  EmptyIntersection,
  DegenerateData,
  NonConvergence,
  VersionMismatch,
  ModelUnavailable,
  MalformedModel,
  UnknownJudge,
  IllegalCloneType,
  MalformedRow,
  MalformedCSV,
  UnknownTool,
  DuplicateTool,
  UnknownExperiment,
  EmptyAfterFilter,
  UnregisteredUser,
  ExperimentComplete,
  TaskNotFound,
  NotComplete,
  Unauthorized,
  MissingVerdict,
  StorageError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clonevet
