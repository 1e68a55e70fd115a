#include "narwhal/equational.hpp"

#include <unordered_set>

#include "narwhal/error.hpp"

namespace narwhal {

Term replaceAt(const Signature& sig, const Term& t, const Position& pos, const Term& replacement) {
  std::vector<Term> path{t};
  for (std::size_t i = 0; i < pos.size(); ++i) path.push_back(path.back()->args().at(pos[i] - 1));
  Term cur = replacement;
  for (std::size_t i = pos.size(); i-- > 0;) {
    std::vector<Term> args = path[i]->args();
    args[pos[i] - 1] = cur;
    cur = sig.apply(path[i]->symbol(), std::move(args));
  }
  return cur;
}

std::vector<ExtendedMatch> matchWithExtension(const Signature& sig, const Term& lhs, const Term& rhs,
                                              const Term& subject, VarGen& gen, bool firstOnly) {
  std::vector<ExtendedMatch> out;
  auto tryPattern = [&](const Term& l, const Term& r) {
    UnifyOptions opts;
    if (firstOnly) opts.maxSolutions = 1;
    for (auto& m : matchModAx(sig, l, subject, opts).solutions) {
      out.push_back({l, r, std::move(m)});
      if (firstOnly) return;
    }
  };
  tryPattern(lhs, rhs);
  if (lhs->isVar() || subject->isVar() || lhs->symbol() != subject->symbol()) return out;
  const Symbol& f = sig.symbol(lhs->symbol());
  if (!f.assoc() || subject->arity() <= lhs->arity()) return out;
  if (firstOnly && !out.empty()) return out;

  SortId ctx = sig.kindSort(sig.kindOf(lhs->sort()));
  auto extended = [&](bool left, bool right) {
    std::vector<Term> l = lhs->args(), r;
    std::vector<Term> pre, post;
    if (left) pre.push_back(sig.makeVar(gen.fresh(VarFamily::Unifier, ctx)));
    if (right) post.push_back(sig.makeVar(gen.fresh(VarFamily::Unifier, ctx)));
    std::vector<Term> la = pre, ra = pre;
    la.insert(la.end(), l.begin(), l.end());
    la.insert(la.end(), post.begin(), post.end());
    ra.push_back(rhs);
    ra.insert(ra.end(), post.begin(), post.end());
    tryPattern(sig.apply(lhs->symbol(), la), sig.apply(lhs->symbol(), ra));
  };
  if (f.comm()) {
    extended(false, true);
  } else {
    extended(false, true);
    if (firstOnly && !out.empty()) return out;
    extended(true, false);
    if (firstOnly && !out.empty()) return out;
    extended(true, true);
  }
  return out;
}

namespace {

class Normalizer {
 public:
  Normalizer(const Theory& th, const NormalizeOptions& opts) : th_(th), sig_(th.signature()), opts_(opts) {}

  NormalForm run(const Term& t) {
    NormalForm nf{t, {}};
    Position pos;
    while (true) {
      pos.clear();
      auto found = findRedex(nf.term, pos);
      if (!found) break;
      if (++steps_ > opts_.budget)
        throw Error(ErrorCode::ReductionBudgetExceeded,
                    "normalization exceeded " + std::to_string(opts_.budget) + " steps");
      Term replaced = applySubstitution(sig_, found->matcher, found->rhs);
      Term next = replaceAt(sig_, nf.term, pos, replaced);
      if (opts_.trace)
        nf.trace.push_back({nf.term, found->label, pos, found->matcher, found->lhs, found->rhs, next});
      nf.term = next;
    }
    return nf;
  }

 private:
  struct Redex {
    std::string label;
    Term lhs, rhs;
    Substitution matcher;
  };

  std::optional<Redex> findRedex(const Term& t, Position& pos) {
    if (t->isVar() || irreducible_.count(t)) return std::nullopt;
    const bool outermost = opts_.strategy == Strategy::LeftmostOutermost;
    if (outermost)
      if (auto r = rootRedex(t)) return r;
    for (std::size_t i = 0; i < t->arity(); ++i) {
      pos.push_back(static_cast<int>(i) + 1);
      auto r = findRedex(t->args()[i], pos);
      if (r) return r;
      pos.pop_back();
    }
    if (!outermost)
      if (auto r = rootRedex(t)) return r;
    irreducible_.insert(t);
    return std::nullopt;
  }

  std::optional<Redex> rootRedex(const Term& t) {
    for (int idx : th_.equationsFor(t->symbol())) {
      const Equation& e = th_.equations[idx];
      auto ms = matchWithExtension(sig_, e.lhs, e.rhs, t, gen_, true);
      if (!ms.empty()) return Redex{e.label, ms[0].lhs, ms[0].rhs, std::move(ms[0].matcher)};
    }
    return std::nullopt;
  }

  const Theory& th_;
  const Signature& sig_;
  NormalizeOptions opts_;
  std::size_t steps_ = 0;
  VarGen gen_{1 << 22};
  std::unordered_set<Term, TermHash, TermEq> irreducible_;
};

}  // namespace

NormalForm normalize(const Theory& theory, const Term& t, const NormalizeOptions& opts) {
  if (theory.equations.empty()) return {t, {}};
  Normalizer n(theory, opts);
  return n.run(t);
}

Term normalForm(const Theory& theory, const Term& t, std::size_t budget) {
  NormalizeOptions opts;
  opts.budget = budget;
  opts.trace = false;
  return normalize(theory, t, opts).term;
}

Substitution normalizeSubstitution(const Theory& theory, const Substitution& s, std::size_t budget) {
  Substitution out;
  for (const auto& [v, t] : s) out.bind(v, normalForm(theory, t, budget));
  return out;
}

bool replayStep(const Theory& theory, const ReductionStep& step) {
  const Signature& sig = theory.signature();
  Term redex = subtermAt(step.source, step.position);
  if (!termEqual(applySubstitution(sig, step.matcher, step.lhs), redex)) return false;
  Term result = replaceAt(sig, step.source, step.position, applySubstitution(sig, step.matcher, step.rhs));
  return termEqual(result, step.result);
}

}  // namespace narwhal
