#include "narwhal/error.hpp"

namespace narwhal {

const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::AmbiguousParse: return "AmbiguousParse";
    case ErrorCode::UnknownSort: return "UnknownSort";
    case ErrorCode::UnknownOp: return "UnknownOp";
    case ErrorCode::SortError: return "SortError";
    case ErrorCode::CyclicSubsorts: return "CyclicSubsorts";
    case ErrorCode::DuplicateOpConflict: return "DuplicateOpConflict";
    case ErrorCode::BadAxiomAttribute: return "BadAxiomAttribute";
    case ErrorCode::NoLeastSort: return "NoLeastSort";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::UnsupportedAxCombination: return "UnsupportedAxCombination";
    case ErrorCode::NameClash: return "NameClash";
    case ErrorCode::ReductionBudgetExceeded: return "ReductionBudgetExceeded";
    case ErrorCode::AlreadyExpanded: return "AlreadyExpanded";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::DepthOutOfRange: return "DepthOutOfRange";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
  }
  return "InternalError";
}

}  // namespace narwhal
