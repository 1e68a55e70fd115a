#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "narwhal/signature.hpp"
#include "narwhal/substitution.hpp"

namespace narwhal::test {

/// Random well-sorted terms over a signature, from a fixed seed.
class TermGen {
 public:
  TermGen(const Signature& sig, unsigned seed) : sig_(sig), rng_(seed) {}

  std::mt19937& rng() { return rng_; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
  }

  void setVars(std::vector<Term> vars) { vars_ = std::move(vars); }
  const std::vector<Term>& vars() const { return vars_; }
  /// Symbols never generated (e.g. `_=?=_`).
  void exclude(SymbolId id) { excluded_.push_back(id); }

  /// A term whose least sort is below `sort`.
  Term term(SortId sort, int depth, double varProb = 0.2) {
    std::vector<Term> leaves;
    for (const auto& v : vars_)
      if (sig_.leq(v->sort(), sort)) leaves.push_back(v);
    std::vector<Term> constants;
    std::vector<std::pair<SymbolId, const OpDecl*>> ops;
    for (SymbolId id = 0; id < static_cast<SymbolId>(sig_.numSymbols()); ++id) {
      const Symbol& s = sig_.symbol(id);
      if (s.poly() || std::find(excluded_.begin(), excluded_.end(), id) != excluded_.end()) continue;
      for (const auto& d : s.decls) {
        if (d.range < 0 || !sig_.leq(d.range, sort)) continue;
        if (s.arity == 0)
          constants.push_back(sig_.apply(id, {}));
        else
          ops.emplace_back(id, &d);
      }
    }
    const bool leaf = depth <= 0 || ops.empty() || coin(0.3);
    if (leaf || (constants.empty() && leaves.empty() && depth <= 0)) {
      if (!leaves.empty() && (constants.empty() || coin(varProb))) return pick(leaves);
      if (!constants.empty()) return pick(constants);
    }
    for (int attempt = 0; attempt < 10 && !ops.empty(); ++attempt) {
      auto [id, decl] = pick(ops);
      const Symbol& s = sig_.symbol(id);
      std::vector<Term> args;
      for (SortId a : decl->domain) args.push_back(term(a, depth - 1, varProb));
      if (s.assoc() && coin(0.4)) args.push_back(term(decl->domain[0], depth - 1, varProb));
      if (auto t = sig_.tryApply(id, args); t && sig_.leq((*t)->sort(), sort)) return *t;
    }
    if (!constants.empty()) return pick(constants);
    return pick(leaves);
  }

  /// Rebuilds `t` without canonical form: comm arguments shuffled, assoc
  /// argument lists re-bracketed at random.
  Term scramble(const Term& t) {
    if (t->isVar() || t->arity() == 0) return t;
    std::vector<Term> args;
    for (const auto& a : t->args()) args.push_back(scramble(a));
    const Symbol& s = sig_.symbol(t->symbol());
    if (s.comm()) std::shuffle(args.begin(), args.end(), rng_);
    if (s.assoc()) {
      while (args.size() > 2) {
        std::size_t i = static_cast<std::size_t>(uniform(0, static_cast<int>(args.size()) - 2));
        Term joined = sig_.applyRaw(t->symbol(), {args[i], args[i + 1]});
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        args.insert(args.begin() + static_cast<long>(i), joined);
      }
    }
    return sig_.applyRaw(t->symbol(), std::move(args));
  }

  /// Replaces random proper subterms by variables of their least sort taken
  /// from `pool` (by sort); at most `maxVars` distinct variables.
  Term abstract(const Term& t, const std::map<SortId, std::vector<Term>>& pool, double p, std::size_t maxVars,
                VarSet& used, bool root = true) {
    if (!root && coin(p)) {
      auto it = pool.find(t->sort());
      if (it != pool.end()) {
        std::vector<Term> options;
        for (const auto& v : it->second)
          if (used.count(v->var()) || used.size() < maxVars) options.push_back(v);
        if (!options.empty()) {
          Term v = pick(options);
          used.insert(v->var());
          return v;
        }
      }
    }
    if (t->isVar() || t->arity() == 0) return t;
    std::vector<Term> args;
    for (const auto& a : t->args()) args.push_back(abstract(a, pool, p, maxVars, used, false));
    if (auto r = sig_.tryApply(t->symbol(), args)) return *r;
    return t;
  }

 private:
  const Signature& sig_;
  std::mt19937 rng_;
  std::vector<Term> vars_;
  std::vector<SymbolId> excluded_;
};

/// All assignments of `vars` to values from `domain` (by sort).
inline void forEachAssignment(const std::vector<Var>& vars, const std::map<SortId, std::vector<Term>>& domain,
                              const Signature& sig, const std::function<bool(const Substitution&)>& f) {
  Substitution current;
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == vars.size()) return f(current);
    for (const auto& [sort, values] : domain) {
      if (sort != vars[i].sort) continue;
      for (const auto& v : values) {
        Substitution saved = current;
        current.bind(vars[i], v);
        if (!go(i + 1)) return false;
        current = saved;
      }
    }
    return true;
  };
  (void)sig;
  go(0);
}

}  // namespace narwhal::test
