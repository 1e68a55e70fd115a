#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace narwhal {

using SortId = int;
using SymbolId = int;

/// Variable namespaces. Module variables live in `Pattern` so that equations
/// can be matched against user terms without renaming; the two fresh families
/// never collide with anything a user can type except through their own
/// `#n` / `%n` syntax.
enum class VarFamily : int { User = 0, Pattern = 1, Rule = 2, Unifier = 3 };

struct Var {
  VarFamily family = VarFamily::User;
  std::string name;  // user / pattern variables
  int index = 0;     // fresh variables
  SortId sort = 0;

  std::strong_ordering operator<=>(const Var& other) const;
  bool operator==(const Var& other) const = default;
};

class TermNode;
using Term = std::shared_ptr<const TermNode>;

/// Immutable term in canonical form. Built only through `Signature`.
class TermNode {
 public:
  bool isVar() const { return isVar_; }
  const Var& var() const { return var_; }
  SymbolId symbol() const { return symbol_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }
  SortId sort() const { return sort_; }
  std::size_t hash() const { return hash_; }
  bool ground() const { return ground_; }
  /// True when some application in the term has no declaration fitting its
  /// argument sorts (the term only lives at the kind level).
  bool illSorted() const { return illSorted_; }
  int size() const { return size_; }

  // Construction is reserved to Signature; public so make_shared works.
  struct Private {};
  TermNode(Private, Var v);
  TermNode(Private, SymbolId symbol, const std::string* name, std::vector<Term> args,
           SortId sort, bool illSorted);

  const std::string& symbolName() const { return *name_; }

 private:
  bool isVar_ = false;
  Var var_;
  SymbolId symbol_ = -1;
  const std::string* name_ = nullptr;
  std::vector<Term> args_;
  SortId sort_ = 0;
  std::size_t hash_ = 0;
  bool ground_ = true;
  bool illSorted_ = false;
  int size_ = 1;
};

/// Total order used for canonical forms: variables < constants <
/// applications; then by name; then argument sequences lexicographically.
int compareTerms(const Term& a, const Term& b);
bool termEqual(const Term& a, const Term& b);

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compareTerms(a, b) < 0; }
};
struct TermHash {
  std::size_t operator()(const Term& t) const { return t->hash(); }
};
struct TermEq {
  bool operator()(const Term& a, const Term& b) const { return termEqual(a, b); }
};

using VarSet = std::set<Var>;

void collectVars(const Term& t, VarSet& out);
VarSet varsOf(const Term& t);
bool occursIn(const Var& v, const Term& t);

/// Positions address the canonical (flattened) form; indices are 1-based.
using Position = std::vector<int>;
std::string positionToString(const Position& p);

Term subtermAt(const Term& t, const Position& p);

/// Non-variable positions in pre-order (root first, children left to right).
std::vector<Position> nonVariablePositions(const Term& t);

}  // namespace narwhal
