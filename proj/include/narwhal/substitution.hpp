#pragma once

#include <map>
#include <utility>

#include "narwhal/signature.hpp"
#include "narwhal/term.hpp"

namespace narwhal {

/// Finite map from variables to terms, ordered by variable for
/// deterministic iteration and printing.
class Substitution {
 public:
  using Map = std::map<Var, Term>;

  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const Var, Term>> init) : map_(init) {}

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  Term lookup(const Var& v) const;
  void bind(const Var& v, Term t) { map_[v] = std::move(t); }
  void erase(const Var& v) { map_.erase(v); }
  bool contains(const Var& v) const { return map_.count(v) != 0; }
  Map::const_iterator begin() const { return map_.begin(); }
  Map::const_iterator end() const { return map_.end(); }
  Map& raw() { return map_; }

  VarSet domain() const;
  VarSet rangeVars() const;

  bool operator==(const Substitution& other) const;

 private:
  Map map_;
};

/// Simultaneous replacement followed by canonicalization. Unchanged
/// subterms are shared, not rebuilt.
Term applySubstitution(const Signature& sig, const Substitution& s, const Term& t);
/// Same, but throws SortError when a binding's term does not fit its
/// variable's sort.
Term applySubstitutionChecked(const Signature& sig, const Substitution& s, const Term& t);

/// apply(compose(s, t), u) == apply(t, apply(s, u)); identity bindings dropped.
Substitution compose(const Signature& sig, const Substitution& s, const Substitution& t);
Substitution restrict(const Substitution& s, const VarSet& vars);
Substitution dropIdentityBindings(const Substitution& s);
bool wellSorted(const Signature& sig, const Substitution& s);
/// No domain variable occurs in any range term.
bool isIdempotent(const Substitution& s);

/// Per-owner counter for fresh variables.
class VarGen {
 public:
  explicit VarGen(int start = 1) : next_(start) {}
  Var fresh(VarFamily family, SortId sort);
  int peek() const { return next_; }

 private:
  int next_;
};

/// Renames every variable of `t` to a fresh variable of `family`.
/// Returns the renamed term and the (bijective) renaming old -> new.
std::pair<Term, Substitution> renameApart(const Signature& sig, const Term& t, VarFamily family,
                                          VarGen& gen);
/// Extends `renaming` with fresh variables for the variables of `t` it does
/// not cover yet, then applies it.
Term renameWith(const Signature& sig, const Term& t, Substitution& renaming, VarFamily family,
                VarGen& gen);

}  // namespace narwhal
