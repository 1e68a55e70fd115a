#include "narwhal/rewriting.hpp"

#include <set>
#include <tuple>

#include "narwhal/module_language.hpp"

namespace narwhal {

std::vector<RewriteStep> oneStepRewrites(const Theory& theory, const Term& t, const VariantOptions& opts) {
  const Signature& sig = theory.signature();
  std::vector<RewriteStep> out;
  std::set<std::tuple<int, std::string, std::string>> seen;
  VarGen gen(freshStartAbove({t}));
  const auto positions = nonVariablePositions(t);
  for (std::size_t ri = 0; ri < theory.rules.size(); ++ri) {
    const Rule& rule = theory.rules[ri];
    Substitution renaming;
    Term lhs = renameWith(sig, rule.lhs, renaming, VarFamily::Rule, gen);
    Term rhs = renameWith(sig, rule.rhs, renaming, VarFamily::Rule, gen);
    FVTree variants = generateVariants(theory, lhs, gen, opts);
    const int kind = sig.kindOf(lhs->sort());
    for (const Position& pos : positions) {
      Term sub = subtermAt(t, pos);
      if (sig.kindOf(sub->sort()) != kind) continue;
      for (const FVNode& node : variants.nodes) {
        if (node.foldedInto >= 0) continue;
        const Variant& v = node.variant;
        Term vrhs = applySubstitution(sig, v.subst, rhs);
        for (auto& m : matchWithExtension(sig, v.term, vrhs, sub, gen, false)) {
          Term raw = replaceAt(sig, t, pos, applySubstitution(sig, m.matcher, m.rhs));
          NormalizeOptions nopts;
          nopts.budget = opts.budget;
          NormalForm nf = normalize(theory, raw, nopts);
          auto key = std::make_tuple(static_cast<int>(ri), positionToString(pos), printTermRaw(sig, nf.term));
          if (!seen.insert(key).second) continue;
          RewriteStep st;
          st.source = t;
          st.ruleLabel = rule.label;
          st.ruleIndex = static_cast<int>(ri);
          st.position = pos;
          st.redex = sub;
          const Substitution full = compose(sig, v.subst, m.matcher);
          for (const auto& [orig, fresh] : renaming)
            if (Term b = full.lookup(fresh->var())) st.matcher.bind(orig, normalForm(theory, b, opts.budget));
          st.lhs = m.lhs;
          st.rhs = m.rhs;
          st.normalization = std::move(nf);
          st.term = st.normalization.term;
          out.push_back(std::move(st));
        }
      }
    }
  }
  return out;
}

}  // namespace narwhal
