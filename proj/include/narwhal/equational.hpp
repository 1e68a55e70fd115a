#pragma once

#include <string>
#include <vector>

#include "narwhal/substitution.hpp"
#include "narwhal/theory.hpp"
#include "narwhal/unify.hpp"

namespace narwhal {

/// One equational step. `lhs`/`rhs` are the equation sides actually used;
/// when matching needed an extension (a slice of a flattened assoc or AC
/// argument list) they carry the context variables bound in `matcher`.
struct ReductionStep {
  Term source;
  std::string label;
  Position position;
  Substitution matcher;
  Term lhs;
  Term rhs;
  Term result;
};

struct NormalForm {
  Term term;
  std::vector<ReductionStep> trace;
};

enum class Strategy { LeftmostInnermost, LeftmostOutermost };

struct NormalizeOptions {
  std::size_t budget = 10000;
  bool trace = true;
  Strategy strategy = Strategy::LeftmostInnermost;
};

/// Replaces the subterm at `pos` and re-canonicalizes along the path.
Term replaceAt(const Signature& sig, const Term& t, const Position& pos, const Term& replacement);

/// Normalization with the equations of the theory, leftmost-innermost by
/// default, first equation in declaration order, first matcher in matcher
/// order. Throws ReductionBudgetExceeded after `budget` steps.
NormalForm normalize(const Theory& theory, const Term& t, const NormalizeOptions& opts = {});
Term normalForm(const Theory& theory, const Term& t, std::size_t budget = 10000);
/// Applies `s`, then normalizes every range term.
Substitution normalizeSubstitution(const Theory& theory, const Substitution& s,
                                   std::size_t budget = 10000);

/// Recomputes a step from its source, position, matcher and sides; true when
/// the recorded result is reproduced exactly.
bool replayStep(const Theory& theory, const ReductionStep& step);

/// Matchers of `pattern` against `subject` allowing extension when the
/// pattern is headed by an assoc symbol. Each entry holds the (possibly
/// extended) pattern, the matching right-hand side and the matcher.
struct ExtendedMatch {
  Term lhs;
  Term rhs;
  Substitution matcher;
};
std::vector<ExtendedMatch> matchWithExtension(const Signature& sig, const Term& lhs, const Term& rhs,
                                              const Term& subject, VarGen& gen, bool firstOnly);

}  // namespace narwhal
