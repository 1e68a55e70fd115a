#include "narwhal/variant.hpp"

#include <deque>

#include "narwhal/error.hpp"

namespace narwhal {

namespace {

Substitution restrictNormalized(const Theory& th, const Substitution& s, const VarSet& vars,
                                std::size_t budget) {
  Substitution out;
  for (const auto& [v, t] : s) {
    if (!vars.count(v)) continue;
    Term n = normalForm(th, t, budget);
    if (n->isVar() && n->var() == v) continue;
    out.bind(v, n);
  }
  return out;
}

void maxIndex(const Term& t, int& best) {
  if (t->isVar()) {
    if (t->var().family == VarFamily::Rule || t->var().family == VarFamily::Unifier)
      best = std::max(best, t->var().index);
    return;
  }
  if (t->ground()) return;
  for (const auto& a : t->args()) maxIndex(a, best);
}

}  // namespace

int freshStartAbove(const std::vector<Term>& terms) {
  int best = 0;
  for (const auto& t : terms) maxIndex(t, best);
  return best + 1;
}

std::vector<FVStep> fvNarrowStep(const Theory& theory, const Variant& v, const VarSet& rootVars,
                                 VarGen& gen, const VariantOptions& opts, bool* truncated) {
  const Signature& sig = theory.signature();
  std::vector<FVStep> out;
  for (const Position& pos : nonVariablePositions(v.term)) {
    Term sub = subtermAt(v.term, pos);
    for (int idx : theory.equationsFor(sub->symbol())) {
      const Equation& e = theory.equations[idx];
      if (!e.variant) continue;
      Substitution renaming;
      Term lhs = renameWith(sig, e.lhs, renaming, VarFamily::Unifier, gen);
      Term rhs = renameWith(sig, e.rhs, renaming, VarFamily::Unifier, gen);
      SolutionSet us = unifyModAx(sig, sub, lhs, gen, opts.unify);
      if (us.truncated && truncated) *truncated = true;
      for (auto& theta : us.solutions) {
        Term replaced = replaceAt(sig, v.term, pos, rhs);
        FVStep step;
        step.raw = applySubstitution(sig, theta, replaced);
        step.child.term = normalForm(theory, step.raw, opts.budget);
        step.child.subst = restrictNormalized(theory, compose(sig, v.subst, theta), rootVars, opts.budget);
        step.child.depth = v.depth + 1;
        step.label = e.label;
        step.position = pos;
        step.unifier = std::move(theta);
        out.push_back(std::move(step));
      }
    }
  }
  return out;
}

bool variantSubsumes(const Signature& sig, const Variant& general, const Variant& specific,
                     const VarSet& rootVars) {
  const Term& g = general.term;
  const Term& s = specific.term;
  if (!g->isVar()) {
    const bool acu = sig.symbol(g->symbol()).theory() == AxTheory::ACU;
    if (!acu && (s->isVar() || s->symbol() != g->symbol())) return false;
  }
  Equations pairs{{g, s}};
  for (const auto& x : rootVars) {
    Term gx = general.subst.lookup(x);
    Term sx = specific.subst.lookup(x);
    pairs.emplace_back(gx ? gx : sig.makeVar(x), sx ? sx : sig.makeVar(x));
  }
  UnifyOptions opts;
  opts.maxSolutions = 1;
  return !matchSystem(sig, pairs, opts).empty();
}

std::vector<int> FVTree::branchTo(int node) const {
  std::vector<int> path;
  for (int n = node; n >= 0; n = nodes[n].parent) path.push_back(n);
  return {path.rbegin(), path.rend()};
}

FVTree generateVariants(const Theory& theory, const Term& t, VarGen& gen, const VariantOptions& opts) {
  const Signature& sig = theory.signature();
  auto tt = theory.successSymbol();
  FVTree tree;
  tree.root = t;
  tree.rootVars = varsOf(t);
  FVNode root;
  root.variant = {normalForm(theory, t, opts.budget), {}, 0};
  root.success = tt && !root.variant.term->isVar() && root.variant.term->symbol() == *tt;
  tree.nodes.push_back(std::move(root));

  std::deque<int> queue{0};
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    if (tree.nodes[id].success) continue;
    if (tree.nodes[id].variant.depth >= opts.maxDepth) {
      tree.complete = false;
      continue;
    }
    Variant v = tree.nodes[id].variant;
    bool truncated = false;
    auto steps = fvNarrowStep(theory, v, tree.rootVars, gen, opts, &truncated);
    if (truncated) tree.complete = false;
    for (auto& st : steps) {
      if (tree.nodes.size() >= opts.maxCount) {
        tree.complete = false;
        queue.clear();
        break;
      }
      FVNode n;
      n.id = static_cast<int>(tree.nodes.size());
      n.parent = id;
      n.label = st.label;
      n.position = st.position;
      n.unifier = std::move(st.unifier);
      n.raw = st.raw;
      n.variant = std::move(st.child);
      n.success = tt && !n.variant.term->isVar() && n.variant.term->symbol() == *tt;
      for (const auto& other : tree.nodes) {
        if (other.foldedInto >= 0) continue;
        if (variantSubsumes(sig, other.variant, n.variant, tree.rootVars)) {
          n.foldedInto = other.id;
          break;
        }
      }
      tree.nodes[id].children.push_back(n.id);
      if (n.foldedInto < 0) queue.push_back(n.id);
      tree.nodes.push_back(std::move(n));
    }
  }
  return tree;
}

Substitution composeBranch(const Theory& theory, const FVTree& tree, int node) {
  Substitution acc;
  for (int n : tree.branchTo(node))
    if (tree.nodes[n].parent >= 0) acc = compose(theory.signature(), acc, tree.nodes[n].unifier);
  return restrictNormalized(theory, acc, tree.rootVars, 10000);
}

VariantUnifiers variantUnifyTerms(const Theory& theory, const Term& t1, const Term& t2, VarGen& gen,
                                  const VariantOptions& opts) {
  auto unif = theory.unificationSymbol();
  if (!unif) throw Error(ErrorCode::InvalidRequest, "theory lacks the unification infrastructure");
  const Signature& sig = theory.signature();
  VariantUnifiers out;
  out.tree = generateVariants(theory, sig.apply(*unif, {t1, t2}), gen, opts);
  std::vector<Substitution> found;
  std::vector<int> leaves;
  for (const auto& n : out.tree.nodes) {
    if (!n.success || n.foldedInto >= 0) continue;
    found.push_back(n.variant.subst);
    leaves.push_back(n.id);
  }
  // keep the witness alongside each surviving unifier
  std::vector<bool> dropped(found.size(), false);
  for (std::size_t i = 0; i < found.size(); ++i)
    for (std::size_t j = 0; j < found.size() && !dropped[i]; ++j) {
      if (i == j || dropped[j]) continue;
      if (moreGeneral(sig, found[j], found[i], out.tree.rootVars) &&
          (j < i || !moreGeneral(sig, found[i], found[j], out.tree.rootVars)))
        dropped[i] = true;
    }
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (dropped[i]) continue;
    out.unifiers.push_back(found[i]);
    out.witness.push_back(leaves[i]);
  }
  out.complete = out.tree.complete;
  return out;
}

}  // namespace narwhal
