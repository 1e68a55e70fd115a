#pragma once

#include <string>
#include <vector>

#include "narwhal/equational.hpp"
#include "narwhal/theory.hpp"
#include "narwhal/unify.hpp"

namespace narwhal {

struct VariantOptions {
  int maxDepth = 10;
  std::size_t maxCount = 512;
  std::size_t budget = 10000;
  UnifyOptions unify;
};

/// A normalized instance of a root term together with the substitution that
/// produced it, restricted to the root's variables.
struct Variant {
  Term term;
  Substitution subst;
  int depth = 0;
};

struct FVStep {
  Variant child;
  std::string label;  // equation label
  Position position;
  Substitution unifier;  // Ax-unifier of the subterm and the renamed lhs
  Term raw;              // instantiated result before normalization
};

struct FVNode {
  int id = 0;
  Variant variant;
  int parent = -1;
  std::string label;
  Position position;
  Substitution unifier;
  Term raw;
  std::vector<int> children;
  int foldedInto = -1;  // subsuming node when folded
  bool success = false;
};

struct FVTree {
  Term root;
  VarSet rootVars;
  std::vector<FVNode> nodes;
  bool complete = true;

  std::vector<int> branchTo(int node) const;  // root first
};

/// One folding-variant-narrowing step with the variant equations, at every
/// non-variable position. `rootVars` is the variable set substitutions are
/// restricted to.
std::vector<FVStep> fvNarrowStep(const Theory& theory, const Variant& v, const VarSet& rootVars,
                                 VarGen& gen, const VariantOptions& opts = {}, bool* truncated = nullptr);

bool variantSubsumes(const Signature& sig, const Variant& general, const Variant& specific,
                     const VarSet& rootVars);

/// Breadth-first folding variant narrowing from normalize(t).
FVTree generateVariants(const Theory& theory, const Term& t, VarGen& gen, const VariantOptions& opts = {});

struct VariantUnifiers {
  std::vector<Substitution> unifiers;
  std::vector<int> witness;  // success node of each unifier
  FVTree tree;
  bool complete = true;
};

/// E-unifiers of t1 and t2 through the `_=?=_` encoding; the theory must
/// carry the unification infrastructure.
VariantUnifiers variantUnifyTerms(const Theory& theory, const Term& t1, const Term& t2, VarGen& gen,
                                  const VariantOptions& opts = {});

/// Composes the edge unifiers along a branch, restricts to the root
/// variables and normalizes the ranges.
Substitution composeBranch(const Theory& theory, const FVTree& tree, int node);

/// Smallest counter value that cannot clash with fresh variables in `terms`.
int freshStartAbove(const std::vector<Term>& terms);

}  // namespace narwhal
