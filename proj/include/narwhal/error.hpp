#pragma once

#include <stdexcept>
#include <string>

namespace narwhal {

enum class ErrorCode {
  SyntaxError,
  AmbiguousParse,
  UnknownSort,
  UnknownOp,
  SortError,
  CyclicSubsorts,
  DuplicateOpConflict,
  BadAxiomAttribute,
  NoLeastSort,
  UnsupportedFeature,
  UnsupportedAxCombination,
  NameClash,
  ReductionBudgetExceeded,
  AlreadyExpanded,
  UnknownNode,
  UnknownEdge,
  UnknownSession,
  DepthOutOfRange,
  InvalidRequest,
};

const char* errorCodeName(ErrorCode code);

/// Every user-facing failure of the engine. The code selects the wire error
/// name and the CLI exit status; the message is human readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace narwhal
