#pragma once

#include <string>
#include <vector>

#include "narwhal/equational.hpp"
#include "narwhal/theory.hpp"
#include "narwhal/variant.hpp"

namespace narwhal {

/// One concrete rewrite step with a rule, modulo the equations: the rule's
/// left-hand side variants are matched against the subject.
struct RewriteStep {
  Term source;
  std::string ruleLabel;
  int ruleIndex = 0;
  Position position;
  Term redex;
  Substitution matcher;  // under the rule's declared variable names
  Term lhs;              // the variant instance that matched
  Term rhs;
  NormalForm normalization;  // from the raw result to `term`
  Term term;
};

/// All one-step rewrites of `t`, in rule order, then position, then matcher
/// order. Duplicate (rule, position, result) triples are dropped.
std::vector<RewriteStep> oneStepRewrites(const Theory& theory, const Term& t, const VariantOptions& opts = {});

}  // namespace narwhal
