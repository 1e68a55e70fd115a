#include "narwhal/narrowing.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "narwhal/module_language.hpp"

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

}  // namespace

std::vector<NarrowingStep> reNarrowChildren(const Theory& theory, const Term& t, const Substitution& path,
                                            const VarSet& rootVars, VarGen& gen,
                                            const NarrowingOptions& opts) {
  const Signature& sig = theory.signature();
  const std::size_t budget = opts.variant.budget;
  std::vector<NarrowingStep> out;
  const VarSet sourceVars = varsOf(t);
  for (std::size_t ri = 0; ri < theory.rules.size(); ++ri) {
    const Rule& rule = theory.rules[ri];
    if (!rule.narrowing) continue;
    Substitution renaming;
    Term lhs = normalForm(theory, renameWith(sig, rule.lhs, renaming, VarFamily::Rule, gen), budget);
    Term rhs = normalForm(theory, renameWith(sig, rule.rhs, renaming, VarFamily::Rule, gen), budget);
    const int kind = sig.kindOf(lhs->sort());
    for (const Position& pos : nonVariablePositions(t)) {
      Term sub = subtermAt(t, pos);
      if (sig.kindOf(sub->sort()) != kind) continue;
      VariantUnifiers vu = variantUnifyTerms(theory, sub, lhs, gen, opts.variant);
      if (vu.unifiers.empty()) continue;
      auto tree = std::make_shared<const FVTree>(std::move(vu.tree));
      Term replaced = replaceAt(sig, t, pos, rhs);
      for (std::size_t k = 0; k < vu.unifiers.size(); ++k) {
        const Substitution& theta = vu.unifiers[k];
        NarrowingStep st;
        st.source = t;
        NormalizeOptions nopts;
        nopts.budget = budget;
        st.normalization = normalize(theory, applySubstitution(sig, theta, replaced), nopts);
        st.term = st.normalization.term;
        st.ruleLabel = rule.label;
        st.ruleIndex = static_cast<int>(ri);
        st.ruleLhs = lhs;
        st.ruleRhs = rhs;
        st.position = pos;
        st.subterm = sub;
        st.renaming = renaming;
        st.unifier = theta;
        for (const auto& [orig, fresh] : renaming)
          if (Term b = theta.lookup(fresh->var())) st.ruleSubstitution.bind(orig, b);
        for (const auto& [v, b] : theta)
          if (sourceVars.count(v)) st.inputSubstitution.bind(v, b);
        st.computed = restrictNormalized(theory, compose(sig, path, theta), rootVars, budget);
        st.complete = vu.complete;
        st.unifierTree = tree;
        st.witness = vu.witness[k];
        out.push_back(std::move(st));
      }
    }
  }
  return out;
}

std::optional<GoalCheck> checkGoal(const Theory& theory, const Term& target, const VarSet& goalVars,
                                   const Term& u, const Substitution& path, VarGen& gen,
                                   const VariantOptions& opts) {
  const Signature& sig = theory.signature();
  Term instance = applySubstitution(sig, path, target);
  VariantUnifiers vu = variantUnifyTerms(theory, u, instance, gen, opts);
  if (vu.unifiers.empty()) return std::nullopt;
  GoalCheck g;
  g.targetUnifiers = vu.unifiers;
  g.answer = restrictNormalized(theory, compose(sig, path, vu.unifiers.front()), goalVars, opts.budget);
  g.complete = vu.complete;
  return g;
}

ReachabilityResult solveReachability(const Theory& theory, const Term& t, const Term& target,
                                     const NarrowingOptions& opts) {
  struct Node {
    Term term;
    Substitution path;
    int depth = 0;
    int parent = -1;
    int step = -1;
  };
  ReachabilityResult result;
  VarGen gen(freshStartAbove({t, target}));
  const VarSet rootVars = varsOf(t);
  VarSet goalVars = rootVars;
  collectVars(target, goalVars);

  std::vector<Node> nodes;
  std::vector<NarrowingStep> steps;
  auto pathTo = [&](int n) {
    std::vector<NarrowingStep> out;
    for (; nodes[n].parent >= 0; n = nodes[n].parent) out.push_back(steps[nodes[n].step]);
    std::reverse(out.begin(), out.end());
    return out;
  };
  auto check = [&](int n) {
    auto g = checkGoal(theory, target, goalVars, nodes[n].term, nodes[n].path, gen, opts.variant);
    if (!g) return false;
    result.solutions.push_back({pathTo(n), nodes[n].term, g->answer, g->targetUnifiers, nodes[n].depth});
    return result.solutions.size() >= opts.maxSolutions;
  };

  nodes.push_back({normalForm(theory, t, opts.variant.budget), {}, 0, -1, -1});
  result.nodes = 1;
  if (check(0)) return result;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    if (nodes[id].depth >= opts.maxDepth) {
      result.boundsHit = true;
      continue;
    }
    auto children = reNarrowChildren(theory, nodes[id].term, nodes[id].path, rootVars, gen, opts);
    for (auto& st : children) {
      if (!st.complete) result.boundsHit = true;
      Node n{st.term, st.computed, nodes[id].depth + 1, id, static_cast<int>(steps.size())};
      steps.push_back(std::move(st));
      nodes.push_back(std::move(n));
      ++result.nodes;
      const int nid = static_cast<int>(nodes.size()) - 1;
      if (check(nid)) {
        result.boundsHit = true;
        return result;
      }
      queue.push_back(nid);
    }
  }
  return result;
}

namespace {

bool hasCommutative(const Signature& sig, const Term& t) {
  if (t->isVar() || t->ground()) return false;
  if (sig.symbol(t->symbol()).comm()) return true;
  for (const auto& a : t->args())
    if (hasCommutative(sig, a)) return true;
  return false;
}

void firstOccurrence(const Term& t, std::vector<Var>& order) {
  if (t->isVar()) {
    if (std::find(order.begin(), order.end(), t->var()) == order.end()) order.push_back(t->var());
    return;
  }
  for (const auto& a : t->args()) firstOccurrence(a, order);
}

std::string keyWith(const Signature& sig, const Term& t, const std::vector<Var>& order) {
  Substitution ren;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Var v;
    v.family = VarFamily::User;
    v.name = "_" + std::to_string(i + 1);
    v.sort = order[i].sort;
    ren.bind(order[i], sig.makeVar(v));
  }
  return printTermRaw(sig, applySubstitution(sig, ren, t));
}

}  // namespace

std::string canonicalStateKey(const Signature& sig, const Term& t) {
  std::vector<Var> order;
  firstOccurrence(t, order);
  if (order.empty()) return printTermRaw(sig, t);
  if (!hasCommutative(sig, t)) return keyWith(sig, t, order);
  if (order.size() <= 6) {
    std::vector<Var> perm = order;
    std::sort(perm.begin(), perm.end());
    std::string best;
    do {
      std::string k = keyWith(sig, t, perm);
      if (best.empty() || k < best) best = k;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // iterate first-occurrence numbering to a fixed point
  std::string key = keyWith(sig, t, order);
  for (int round = 0; round < 8; ++round) {
    Substitution ren;
    for (std::size_t i = 0; i < order.size(); ++i) {
      Var v;
      v.family = VarFamily::User;
      v.name = "_" + std::to_string(i + 1);
      v.sort = order[i].sort;
      ren.bind(order[i], sig.makeVar(v));
    }
    Term renamed = applySubstitution(sig, ren, t);
    std::vector<Var> next;
    firstOccurrence(renamed, next);
    std::vector<Var> back;
    for (const auto& v : next) {
      int idx = std::stoi(v.name.substr(1)) - 1;
      back.push_back(order[idx]);
    }
    if (back == order) break;
    order = back;
    key = std::min(key, keyWith(sig, t, order));
  }
  return key;
}

}  // namespace narwhal
