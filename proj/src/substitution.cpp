#include "narwhal/substitution.hpp"

#include "narwhal/error.hpp"

namespace narwhal {

Term Substitution::lookup(const Var& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : it->second;
}

VarSet Substitution::domain() const {
  VarSet out;
  for (const auto& [v, t] : map_) out.insert(v);
  return out;
}

VarSet Substitution::rangeVars() const {
  VarSet out;
  for (const auto& [v, t] : map_) collectVars(t, out);
  return out;
}

bool Substitution::operator==(const Substitution& other) const {
  if (map_.size() != other.map_.size()) return false;
  auto it = other.map_.begin();
  for (const auto& [v, t] : map_) {
    if (!(v == it->first) || !termEqual(t, it->second)) return false;
    ++it;
  }
  return true;
}

namespace {

Term applyRec(const Signature& sig, const Substitution& s, const Term& t, bool check) {
  if (t->isVar()) {
    Term b = s.lookup(t->var());
    if (!b) return t;
    if (check && !sig.leq(b->sort(), t->var().sort))
      throw Error(ErrorCode::SortError, "binding for variable " + t->var().name +
                                            " has sort " + sig.sortLabel(b->sort()) +
                                            ", expected " + sig.sortLabel(t->var().sort));
    return b;
  }
  if (t->ground()) return t;
  bool changed = false;
  std::vector<Term> args;
  args.reserve(t->arity());
  for (const auto& a : t->args()) {
    Term n = applyRec(sig, s, a, check);
    changed = changed || n.get() != a.get();
    args.push_back(std::move(n));
  }
  if (!changed) return t;
  return sig.apply(t->symbol(), std::move(args));
}

}  // namespace

Term applySubstitution(const Signature& sig, const Substitution& s, const Term& t) {
  if (s.empty()) return t;
  return applyRec(sig, s, t, false);
}

Term applySubstitutionChecked(const Signature& sig, const Substitution& s, const Term& t) {
  return applyRec(sig, s, t, true);
}

Substitution compose(const Signature& sig, const Substitution& s, const Substitution& t) {
  Substitution out;
  for (const auto& [v, term] : s) out.bind(v, applySubstitution(sig, t, term));
  for (const auto& [v, term] : t)
    if (!s.contains(v)) out.bind(v, term);
  return dropIdentityBindings(out);
}

Substitution restrict(const Substitution& s, const VarSet& vars) {
  Substitution out;
  for (const auto& [v, t] : s)
    if (vars.count(v)) out.bind(v, t);
  return out;
}

Substitution dropIdentityBindings(const Substitution& s) {
  Substitution out;
  for (const auto& [v, t] : s)
    if (!(t->isVar() && t->var() == v)) out.bind(v, t);
  return out;
}

bool wellSorted(const Signature& sig, const Substitution& s) {
  for (const auto& [v, t] : s)
    if (!sig.leq(t->sort(), v.sort)) return false;
  return true;
}

bool isIdempotent(const Substitution& s) {
  VarSet dom = s.domain();
  for (const auto& [v, t] : s)
    for (const auto& w : varsOf(t))
      if (dom.count(w)) return false;
  return true;
}

Var VarGen::fresh(VarFamily family, SortId sort) {
  Var v;
  v.family = family;
  v.index = next_++;
  v.sort = sort;
  return v;
}

Term renameWith(const Signature& sig, const Term& t, Substitution& renaming, VarFamily family,
                VarGen& gen) {
  for (const auto& v : varsOf(t))
    if (!renaming.contains(v)) renaming.bind(v, sig.makeVar(gen.fresh(family, v.sort)));
  return applySubstitution(sig, renaming, t);
}

std::pair<Term, Substitution> renameApart(const Signature& sig, const Term& t, VarFamily family,
                                          VarGen& gen) {
  Substitution renaming;
  Term out = renameWith(sig, t, renaming, family, gen);
  return {out, renaming};
}

}  // namespace narwhal
