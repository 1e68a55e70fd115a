#include "narwhal/unify.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

namespace narwhal {

namespace {

struct State {
  Substitution sigma;
  Equations todo;  // processed from the back
  std::map<Var, int> generation;
};

class Solver {
 public:
  Solver(const Signature& sig, const VarSet& frozen, VarGen& gen, const UnifyOptions& opts)
      : sig_(sig), frozen_(frozen), gen_(gen), opts_(opts) {}

  SolutionSet run(const Equations& eqs) {
    State init;
    for (auto it = eqs.rbegin(); it != eqs.rend(); ++it) init.todo.push_back(*it);
    std::vector<State> stack;
    stack.push_back(std::move(init));
    while (!stack.empty() && out_.solutions.size() < opts_.maxSolutions) {
      State st = std::move(stack.back());
      stack.pop_back();
      std::vector<State> branches;
      Outcome o = process(st, branches);
      if (o == Outcome::Solved) {
        if (finalSortsOk(st.sigma)) out_.solutions.push_back(std::move(st.sigma));
      } else if (o == Outcome::Branch) {
        for (auto it = branches.rbegin(); it != branches.rend(); ++it) stack.push_back(std::move(*it));
      }
    }
    return std::move(out_);
  }

 private:
  enum class Outcome { Solved, Failed, Branch };

  bool bindable(const Term& t) const { return t->isVar() && !frozen_.count(t->var()); }

  bool splittable(const Term& t, SymbolId f) const {
    return bindable(t) && sig_.rangeCanFit(f, t->var().sort);
  }

  bool hasBindable(const Term& t) const {
    if (t->isVar()) return bindable(t);
    if (t->ground()) return false;
    for (const auto& a : t->args())
      if (hasBindable(a)) return true;
    return false;
  }

  bool finalSortsOk(const Substitution& s) const {
    for (const auto& [v, t] : s)
      if (!sig_.leq(t->sort(), v.sort) || t->illSorted()) return false;
    return true;
  }

  Term fresh(SortId sort) { return sig_.makeVar(gen_.fresh(VarFamily::Unifier, sort)); }

  // Adds x -> t to the idempotent solved form; t is already instantiated.
  void bind(State& st, const Var& x, const Term& t) {
    Substitution one{{x, t}};
    for (auto& [v, r] : st.sigma.raw()) r = applySubstitution(sig_, one, r);
    st.sigma.bind(x, t);
  }

  Outcome process(State& st, std::vector<State>& branches) {
    while (!st.todo.empty()) {
      auto [l, r] = st.todo.back();
      st.todo.pop_back();
      Term s = applySubstitution(sig_, st.sigma, l);
      Term t = applySubstitution(sig_, st.sigma, r);
      if (termEqual(s, t)) continue;
      if (sig_.kindOf(s->sort()) != sig_.kindOf(t->sort())) return Outcome::Failed;
      if (!bindable(s) && bindable(t)) std::swap(s, t);
      if (bindable(s)) {
        Outcome o = solveVar(st, s, t, branches);
        if (o == Outcome::Failed || o == Outcome::Branch) return o;
        continue;
      }
      if (s->isVar() || t->isVar()) {
        // frozen variable against something else: only an ACU collapse helps
        const Term& other = s->isVar() ? t : s;
        if (!other->isVar() && sig_.symbol(other->symbol()).theory() == AxTheory::ACU)
          return acBranches(st, other->symbol(), s, t, branches);
        return Outcome::Failed;
      }
      const SymbolId f = s->symbol(), g = t->symbol();
      const AxTheory thF = sig_.symbol(f).theory();
      const AxTheory thG = sig_.symbol(g).theory();
      if (thF == AxTheory::ACU) return acBranches(st, f, s, t, branches);
      if (thG == AxTheory::ACU) return acBranches(st, g, s, t, branches);
      if (f != g) return Outcome::Failed;
      switch (thF) {
        case AxTheory::Free:
        case AxTheory::Unsupported:
          if (s->arity() != t->arity()) return Outcome::Failed;
          for (std::size_t k = s->arity(); k-- > 0;) st.todo.emplace_back(s->args()[k], t->args()[k]);
          break;
        case AxTheory::C: {
          const auto& a = s->args();
          const auto& b = t->args();
          State straight = st;
          straight.todo.emplace_back(a[1], b[1]);
          straight.todo.emplace_back(a[0], b[0]);
          branches.push_back(std::move(straight));
          if (!termEqual(a[0], a[1]) && !termEqual(b[0], b[1])) {
            State crossed = st;
            crossed.todo.emplace_back(a[1], b[0]);
            crossed.todo.emplace_back(a[0], b[1]);
            branches.push_back(std::move(crossed));
          }
          return Outcome::Branch;
        }
        case AxTheory::A:
          return assocBranches(st, f, s->args(), t->args(), branches);
        case AxTheory::AC:
          return acBranches(st, f, s, t, branches);
        case AxTheory::ACU:
          break;
      }
    }
    return Outcome::Solved;
  }

  Outcome solveVar(State& st, const Term& s, const Term& t, std::vector<State>& branches) {
    const Var& x = s->var();
    if (t->isVar()) {
      const Var& y = t->var();
      if (!bindable(t)) {
        if (!sig_.leq(y.sort, x.sort)) return Outcome::Failed;
        bind(st, x, t);
        return Outcome::Solved;
      }
      if (sig_.leq(y.sort, x.sort)) {
        bind(st, x, t);
      } else if (sig_.leq(x.sort, y.sort)) {
        bind(st, y, s);
      } else {
        auto lower = sig_.glb(x.sort, y.sort);
        if (lower.empty()) return Outcome::Failed;
        for (SortId g : lower) {
          State b = st;
          Term z = fresh(g);
          bind(b, x, z);
          bind(b, y, z);
          branches.push_back(std::move(b));
        }
        return Outcome::Branch;
      }
      return Outcome::Solved;
    }
    if (occursIn(x, t)) {
      const Symbol& f = sig_.symbol(t->symbol());
      if (f.theory() == AxTheory::ACU) {
        for (const auto& a : t->args())
          if (a->isVar() && a->var() == x) return acBranches(st, t->symbol(), s, t, branches);
      }
      return Outcome::Failed;
    }
    if (!sig_.leq(t->sort(), x.sort) && !hasBindable(t)) return Outcome::Failed;
    bind(st, x, t);
    return Outcome::Solved;
  }

  // ---- associative ----------------------------------------------------------

  Term seq(SymbolId f, std::vector<Term> elems) const {
    if (elems.size() == 1) return elems.front();
    return sig_.apply(f, std::move(elems));
  }

  Outcome assocBranches(State& st, SymbolId f, std::vector<Term> S, std::vector<Term> T,
                        std::vector<State>& branches) {
    while (S.size() > 1 && T.size() > 1 && termEqual(S.front(), T.front())) {
      S.erase(S.begin());
      T.erase(T.begin());
    }
    while (S.size() > 1 && T.size() > 1 && termEqual(S.back(), T.back())) {
      S.pop_back();
      T.pop_back();
    }
    auto anySplit = [&](const std::vector<Term>& v) {
      return std::any_of(v.begin(), v.end(), [&](const Term& e) { return splittable(e, f); });
    };
    const bool splitS = anySplit(S), splitT = anySplit(T);
    if ((!splitS && S.size() < T.size()) || (!splitT && T.size() < S.size())) return Outcome::Failed;
    if (S.size() == 1 || T.size() == 1) {
      st.todo.emplace_back(seq(f, S), seq(f, T));
      branches.push_back(std::move(st));
      return Outcome::Branch;
    }
    const Term& s1 = S.front();
    const Term& t1 = T.front();
    std::vector<Term> restS(S.begin() + 1, S.end()), restT(T.begin() + 1, T.end());

    {
      State b = st;
      b.todo.emplace_back(seq(f, restS), seq(f, restT));
      b.todo.emplace_back(s1, t1);
      branches.push_back(std::move(b));
    }
    auto longer = [&](const Term& x, const Term& y, const std::vector<Term>& restX,
                      const std::vector<Term>& restY, bool oppositeSplits) {
      int g = st.generation.count(x->var()) ? st.generation.at(x->var()) : 0;
      if (oppositeSplits && g >= opts_.assocBound) {
        out_.truncated = true;
        return;
      }
      State b = st;
      Term rest = fresh(x->var().sort);
      b.generation[rest->var()] = g + 1;
      bind(b, x->var(), sig_.apply(f, {y, rest}));
      std::vector<Term> lhs{rest};
      lhs.insert(lhs.end(), restX.begin(), restX.end());
      b.todo.emplace_back(seq(f, lhs), seq(f, restY));
      branches.push_back(std::move(b));
    };
    if (splittable(s1, f) && !occursIn(s1->var(), t1)) longer(s1, t1, restS, restT, splitT);
    if (splittable(t1, f) && !occursIn(t1->var(), s1)) longer(t1, s1, restT, restS, splitS);
    return Outcome::Branch;
  }

  // ---- associative-commutative (with or without identity) ------------------

  std::vector<Term> elements(SymbolId f, const Term& t) const {
    const Symbol& sym = sig_.symbol(f);
    if (!t->isVar() && t->symbol() == f) return t->args();
    if (sym.identity && termEqual(t, sym.identity)) return {};
    return {t};
  }

  static void group(const std::vector<Term>& in, std::vector<Term>& elems, std::vector<int>& mult) {
    std::vector<Term> sorted = in;
    std::sort(sorted.begin(), sorted.end(), TermLess{});
    for (const auto& e : sorted) {
      if (!elems.empty() && termEqual(elems.back(), e)) {
        ++mult.back();
      } else {
        elems.push_back(e);
        mult.push_back(1);
      }
    }
  }

  static std::vector<std::vector<int>> diophantineBasis(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::vector<int>> basis;
    const bool unit = std::all_of(a.begin(), a.end(), [](int c) { return c == 1; }) &&
                      std::all_of(b.begin(), b.end(), [](int c) { return c == 1; });
    if (unit) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          std::vector<int> v(m + n, 0);
          v[i] = 1;
          v[m + j] = 1;
          basis.push_back(std::move(v));
        }
      return basis;
    }
    const int maxA = *std::max_element(a.begin(), a.end());
    const int maxB = *std::max_element(b.begin(), b.end());
    std::vector<std::vector<int>> sols;
    std::vector<int> x(m, 0), y(n, 0);
    std::function<void(std::size_t, int)> enumY = [&](std::size_t j, int remaining) {
      if (j == n) {
        if (remaining == 0) {
          std::vector<int> v(x);
          v.insert(v.end(), y.begin(), y.end());
          sols.push_back(std::move(v));
        }
        return;
      }
      for (int c = 0; c <= maxA && c * b[j] <= remaining; ++c) {
        y[j] = c;
        enumY(j + 1, remaining - c * b[j]);
      }
      y[j] = 0;
    };
    std::function<void(std::size_t, int)> enumX = [&](std::size_t i, int sum) {
      if (i == m) {
        if (sum > 0) enumY(0, sum);
        return;
      }
      for (int c = 0; c <= maxB; ++c) {
        x[i] = c;
        enumX(i + 1, sum + c * a[i]);
      }
      x[i] = 0;
    };
    enumX(0, 0);
    for (const auto& v : sols) {
      bool minimal = true;
      for (const auto& w : sols) {
        if (&w == &v) continue;
        bool le = true, strict = false;
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (w[k] > v[k]) le = false;
          if (w[k] < v[k]) strict = true;
        }
        if (le && strict) {
          minimal = false;
          break;
        }
      }
      if (minimal) basis.push_back(v);
    }
    return basis;
  }

  Outcome acBranches(State& st, SymbolId f, const Term& s, const Term& t, std::vector<State>& branches) {
    const Symbol& sym = sig_.symbol(f);
    const bool unit = sym.theory() == AxTheory::ACU;
    std::vector<Term> S = elements(f, s), T = elements(f, t);
    // cancel common elements
    std::vector<Term> restT;
    std::vector<bool> used(S.size(), false);
    for (const auto& e : T) {
      bool cancelled = false;
      for (std::size_t k = 0; k < S.size(); ++k)
        if (!used[k] && termEqual(S[k], e)) {
          used[k] = true;
          cancelled = true;
          break;
        }
      if (!cancelled) restT.push_back(e);
    }
    std::vector<Term> restS;
    for (std::size_t k = 0; k < S.size(); ++k)
      if (!used[k]) restS.push_back(S[k]);

    if (restS.empty() && restT.empty()) {
      branches.push_back(std::move(st));
      return Outcome::Branch;
    }
    if (restS.empty() || restT.empty()) {
      if (!unit) return Outcome::Failed;
      for (const auto& e : restS.empty() ? restT : restS)
        if (!splittable(e, f)) return Outcome::Failed;
      for (const auto& e : restS.empty() ? restT : restS) st.todo.emplace_back(e, sym.identity);
      branches.push_back(std::move(st));
      return Outcome::Branch;
    }

    std::vector<Term> elems;
    std::vector<int> a, b;
    {
      std::vector<Term> le, re;
      group(restS, le, a);
      group(restT, re, b);
      elems = le;
      elems.insert(elems.end(), re.begin(), re.end());
    }
    const std::size_t cols = elems.size();
    std::vector<bool> single(cols);
    for (std::size_t k = 0; k < cols; ++k) single[k] = !splittable(elems[k], f);

    std::vector<std::vector<int>> basis;
    for (auto& v : diophantineBasis(a, b)) {
      bool ok = true;
      for (std::size_t k = 0; k < cols && ok; ++k) ok = !(single[k] && v[k] > 1);
      if (ok) basis.push_back(std::move(v));
    }

    // which columns can still be covered by vectors at index >= i
    std::vector<std::vector<bool>> coverable(basis.size() + 1, std::vector<bool>(cols, false));
    for (std::size_t i = basis.size(); i-- > 0;)
      for (std::size_t k = 0; k < cols; ++k) coverable[i][k] = coverable[i + 1][k] || basis[i][k] > 0;

    std::vector<int> sums(cols, 0);
    std::vector<std::size_t> chosen;
    std::size_t before = branches.size();
    std::function<void(std::size_t)> select = [&](std::size_t i) {
      for (std::size_t k = 0; k < cols; ++k) {
        bool need = single[k] || !unit;
        if (need && sums[k] == 0 && !coverable[i][k]) return;
      }
      if (i == basis.size()) {
        branches.push_back(instantiate(st, f, elems, basis, chosen));
        return;
      }
      bool fits = true;
      for (std::size_t k = 0; k < cols && fits; ++k)
        fits = !(single[k] && sums[k] + basis[i][k] > 1);
      if (fits) {
        for (std::size_t k = 0; k < cols; ++k) sums[k] += basis[i][k];
        chosen.push_back(i);
        select(i + 1);
        chosen.pop_back();
        for (std::size_t k = 0; k < cols; ++k) sums[k] -= basis[i][k];
      }
      select(i + 1);
    };
    select(0);
    return branches.size() > before ? Outcome::Branch : Outcome::Failed;
  }

  State instantiate(const State& st, SymbolId f, const std::vector<Term>& elems,
                    const std::vector<std::vector<int>>& basis, const std::vector<std::size_t>& chosen) {
    const Symbol& sym = sig_.symbol(f);
    State b = st;
    std::vector<Term> zs;
    for (std::size_t c = 0; c < chosen.size(); ++c) {
      // a vector touching a single non-splittable column takes that column's sort
      SortId sort = sig_.argumentSort(f);
      zs.push_back(fresh(sort));
    }
    std::vector<std::pair<Term, Term>> eqs;
    for (std::size_t k = 0; k < elems.size(); ++k) {
      std::vector<Term> parts;
      for (std::size_t c = 0; c < chosen.size(); ++c)
        for (int r = 0; r < basis[chosen[c]][k]; ++r) parts.push_back(zs[c]);
      Term rhs;
      if (parts.empty()) {
        rhs = sym.identity;
      } else if (parts.size() == 1) {
        rhs = parts.front();
      } else {
        rhs = sig_.apply(f, parts);
      }
      eqs.emplace_back(elems[k], rhs);
    }
    for (auto it = eqs.rbegin(); it != eqs.rend(); ++it) b.todo.push_back(*it);
    return b;
  }

  const Signature& sig_;
  const VarSet& frozen_;
  VarGen& gen_;
  UnifyOptions opts_;
  SolutionSet out_;
};

}  // namespace

SolutionSet solveEquations(const Signature& sig, const Equations& eqs, const VarSet& frozen,
                           VarGen& gen, const UnifyOptions& opts) {
  Solver solver(sig, frozen, gen, opts);
  return solver.run(eqs);
}

SolutionSet unifyModAx(const Signature& sig, const Term& t1, const Term& t2, VarGen& gen,
                       const UnifyOptions& opts) {
  SolutionSet raw = solveEquations(sig, {{t1, t2}}, {}, gen, opts);
  VarSet vars = varsOf(t1);
  collectVars(t2, vars);
  std::vector<Substitution> restricted;
  for (const auto& s : raw.solutions) restricted.push_back(restrict(s, vars));
  SolutionSet out;
  out.truncated = raw.truncated;
  out.solutions = minimizeBySubsumption(sig, std::move(restricted), vars);
  return out;
}

SolutionSet matchSystem(const Signature& sig, const Equations& pairs, const UnifyOptions& opts) {
  VarSet patternVars, subjectVars;
  for (const auto& [p, s] : pairs) {
    collectVars(p, patternVars);
    collectVars(s, subjectVars);
  }
  bool clash = false;
  for (const auto& v : patternVars) clash = clash || subjectVars.count(v);
  VarGen gen(1 << 20);
  Equations eqs = pairs;
  Substitution renaming, back;
  if (clash) {
    for (auto& [p, s] : eqs) p = renameWith(sig, p, renaming, VarFamily::Unifier, gen);
    for (const auto& [v, t] : renaming) back.bind(t->var(), sig.makeVar(v));
  }
  SolutionSet raw = solveEquations(sig, eqs, subjectVars, gen, opts);
  SolutionSet out;
  out.truncated = raw.truncated;
  for (const auto& s : raw.solutions) {
    Substitution m;
    for (const auto& v : patternVars) {
      Term key = clash ? renaming.lookup(v) : sig.makeVar(v);
      Term val = applySubstitution(sig, s, key);
      if (!(val->isVar() && val->var() == v && !subjectVars.count(v))) m.bind(v, val);
    }
    bool dup = false;
    for (const auto& o : out.solutions) dup = dup || o == m;
    if (!dup) out.solutions.push_back(std::move(m));
  }
  return out;
}

SolutionSet matchModAx(const Signature& sig, const Term& pattern, const Term& subject,
                       const UnifyOptions& opts) {
  return matchSystem(sig, {{pattern, subject}}, opts);
}

bool moreGeneral(const Signature& sig, const Substitution& general, const Substitution& specific,
                 const VarSet& vars) {
  Equations pairs;
  for (const auto& v : vars) {
    Term x = sig.makeVar(v);
    Term g = general.lookup(v);
    Term s = specific.lookup(v);
    pairs.emplace_back(g ? g : x, s ? s : x);
  }
  if (pairs.empty()) return true;
  // Variables of the general side must be renamed apart from the specific
  // side, consistently across all pairs.
  VarGen gen(1 << 21);
  Substitution renaming;
  for (auto& [g, s] : pairs) g = renameWith(sig, g, renaming, VarFamily::Unifier, gen);
  VarSet frozen;
  for (const auto& [g, s] : pairs) collectVars(s, frozen);
  UnifyOptions opts;
  opts.maxSolutions = 1;
  return !solveEquations(sig, pairs, frozen, gen, opts).empty();
}

std::vector<Substitution> minimizeBySubsumption(const Signature& sig, std::vector<Substitution> subs,
                                                const VarSet& vars) {
  std::vector<Substitution> kept;
  std::vector<bool> dropped(subs.size(), false);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = 0; j < subs.size() && !dropped[i]; ++j) {
      if (i == j || dropped[j]) continue;
      if (moreGeneral(sig, subs[j], subs[i], vars)) {
        // equivalent pair: keep the earlier one
        if (j > i && moreGeneral(sig, subs[i], subs[j], vars)) {
          dropped[j] = true;
        } else {
          dropped[i] = true;
        }
      }
    }
  }
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (!dropped[i]) kept.push_back(std::move(subs[i]));
  return kept;
}

std::optional<Substitution> renamingBetween(const Signature& sig, const Term& a, const Term& b) {
  if (a->hash() == b->hash() && termEqual(a, b)) {
    Substitution id;
    for (const auto& v : varsOf(a)) id.bind(v, sig.makeVar(v));
    return id;
  }
  if (a->size() != b->size()) return std::nullopt;
  VarSet va = varsOf(a), vb = varsOf(b);
  if (va.size() != vb.size()) return std::nullopt;
  SolutionSet ms = matchModAx(sig, a, b);
  for (const auto& m : ms.solutions) {
    Substitution full;
    VarSet image;
    bool ok = true;
    for (const auto& v : va) {
      Term t = m.lookup(v);
      if (!t) t = sig.makeVar(v);
      if (!t->isVar() || t->var().sort != v.sort || !image.insert(t->var()).second) {
        ok = false;
        break;
      }
      full.bind(v, t);
    }
    if (ok && image.size() == vb.size()) return full;
  }
  return std::nullopt;
}

bool equalModAxAndRenaming(const Signature& sig, const Term& a, const Term& b) {
  return renamingBetween(sig, a, b).has_value();
}

}  // namespace narwhal
