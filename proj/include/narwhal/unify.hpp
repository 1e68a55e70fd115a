#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "narwhal/signature.hpp"
#include "narwhal/substitution.hpp"
#include "narwhal/term.hpp"

namespace narwhal {

struct UnifyOptions {
  /// Maximum number of splits a sequence variable may take part in during
  /// associative unification when both sides still contain such variables.
  int assocBound = 4;
  std::size_t maxSolutions = 4096;
};

struct SolutionSet {
  std::vector<Substitution> solutions;
  bool truncated = false;  // some branch was cut by the associative bound
  bool empty() const { return solutions.empty(); }
  std::size_t size() const { return solutions.size(); }
};

using Equations = std::vector<std::pair<Term, Term>>;

/// Solves a system of equations modulo the axioms of the signature
/// (free, C, A, AC, ACU). Variables in `frozen` behave as constants. The
/// returned substitutions are idempotent, well sorted and unrestricted.
SolutionSet solveEquations(const Signature& sig, const Equations& eqs, const VarSet& frozen,
                           VarGen& gen, const UnifyOptions& opts = {});

/// Minimal complete set of Ax-unifiers restricted to vars(t1) + vars(t2).
SolutionSet unifyModAx(const Signature& sig, const Term& t1, const Term& t2, VarGen& gen,
                       const UnifyOptions& opts = {});

/// Ax-matchers of `pattern` onto `subject`; subject variables are treated as
/// constants. Results bind pattern variables only.
SolutionSet matchModAx(const Signature& sig, const Term& pattern, const Term& subject,
                       const UnifyOptions& opts = {});
/// Simultaneous matching of several pattern/subject pairs.
SolutionSet matchSystem(const Signature& sig, const Equations& pairs, const UnifyOptions& opts = {});

/// True when `general` is at least as general as `specific` on `vars`:
/// some delta gives delta(general(x)) =Ax specific(x) for every x in vars.
bool moreGeneral(const Signature& sig, const Substitution& general, const Substitution& specific,
                 const VarSet& vars);

/// Drops every substitution that is an instance of an earlier kept one or
/// of a strictly more general later one. Order of the survivors is kept.
std::vector<Substitution> minimizeBySubsumption(const Signature& sig,
                                                std::vector<Substitution> subs,
                                                const VarSet& vars);

/// Sort-preserving variable bijection rho with rho(a) == b, when one exists.
std::optional<Substitution> renamingBetween(const Signature& sig, const Term& a, const Term& b);
bool equalModAxAndRenaming(const Signature& sig, const Term& a, const Term& b);

}  // namespace narwhal
