#pragma once

#include <string>
#include <vector>

#include "narwhal/theory.hpp"

namespace narwhal {

struct Diagnostic {
  enum class Level { Info, Warning, Error };
  Level level = Level::Info;
  std::string code;     // "non-topmost", "extra-variables", "unsupported-axioms"
  std::string message;
};

struct TransformReport {
  std::vector<std::string> addedOps;
  std::vector<std::string> addedEquations;  // labels, e.g. "unif [String]", "AU1 __"
  std::vector<std::string> replacedOps;
  std::vector<Diagnostic> diagnostics;
};

struct Transformed {
  TheoryPtr theory;
  TransformReport report;
};

/// Adds `_=?=_`, `tt` and one `X:[K] =?= X:[K] = tt` variant equation per
/// kind ([Bool] first). Throws NameClash when already present.
Transformed addUnificationInfrastructure(const Theory& theory);

/// Replaces every assoc+id operator by an assoc one plus AU1..AU3.
/// Operators with an identity but no assoc (U, Ul, Ur, CU) lose the identity
/// internally and get hidden variant equations; they print as declared.
Transformed transformAU(const Theory& theory);

/// Both transformations plus executability diagnostics; what sessions run.
Transformed transformTheory(const Theory& theory);

std::vector<Diagnostic> checkExecutability(const Theory& theory);

/// Number of rhs variables of a rule that do not occur in its lhs.
int extraVariableCount(const Rule& rule);

}  // namespace narwhal
