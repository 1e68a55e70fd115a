#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "narwhal/equational.hpp"
#include "narwhal/theory.hpp"
#include "narwhal/variant.hpp"

namespace narwhal {

struct NarrowingOptions {
  VariantOptions variant;
  int maxDepth = 10;
  std::size_t maxSolutions = 1;
};

/// One (R,E)-narrowing step. Rule variables are renamed apart into the
/// rule family; `renaming` maps the declared names to the fresh ones.
struct NarrowingStep {
  Term source;
  Term term;            // normalized result
  NormalForm normalization;  // from the instantiated result to `term`
  std::string ruleLabel;
  int ruleIndex = 0;
  Term ruleLhs;  // renamed copy
  Term ruleRhs;
  Position position;
  Term subterm;  // source at `position`
  Substitution renaming;
  Substitution unifier;            // the E-unifier, over renamed variables
  Substitution ruleSubstitution;   // rule bindings under their declared names
  Substitution inputSubstitution;  // bindings of source variables
  Substitution computed;           // path substitution, restricted to root variables
  bool complete = true;            // unifier set was not cut by a bound
  std::shared_ptr<const FVTree> unifierTree;
  int witness = -1;  // success node of `unifier` in `unifierTree`
};

std::vector<NarrowingStep> reNarrowChildren(const Theory& theory, const Term& t, const Substitution& path,
                                            const VarSet& rootVars, VarGen& gen,
                                            const NarrowingOptions& opts = {});

struct GoalCheck {
  std::vector<Substitution> targetUnifiers;  // all of them, in order
  Substitution answer;                       // path then first unifier, restricted
  bool complete = true;
};

/// E-unifies `u` with the path instance of `target`.
std::optional<GoalCheck> checkGoal(const Theory& theory, const Term& target, const VarSet& goalVars,
                                   const Term& u, const Substitution& path, VarGen& gen,
                                   const VariantOptions& opts = {});

struct ReachabilitySolution {
  std::vector<NarrowingStep> steps;  // root to solution
  Term state;
  Substitution answer;
  std::vector<Substitution> targetUnifiers;
  int depth = 0;
};

struct ReachabilityResult {
  std::vector<ReachabilitySolution> solutions;
  bool boundsHit = false;
  std::size_t nodes = 0;
};

/// Breadth-first search for `t` ->* `target` up to the depth and solution
/// bounds.
ReachabilityResult solveReachability(const Theory& theory, const Term& t, const Term& target,
                                     const NarrowingOptions& opts = {});

/// Equal for two terms iff they are equal modulo axioms and renaming.
/// Exact up to six variables under commutative symbols; beyond that the
/// key may separate renamed-equal terms.
std::string canonicalStateKey(const Signature& sig, const Term& t);

}  // namespace narwhal
