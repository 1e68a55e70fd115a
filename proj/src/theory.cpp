#include "narwhal/theory.hpp"

namespace narwhal {

void Theory::prepare() {
  eqsBySymbol_.assign(sig->numSymbols(), {});
  variantEqs_.clear();
  for (std::size_t i = 0; i < equations.size(); ++i) {
    const auto& e = equations[i];
    if (!e.lhs->isVar()) eqsBySymbol_[e.lhs->symbol()].push_back(static_cast<int>(i));
    if (e.variant) variantEqs_.push_back(static_cast<int>(i));
  }
  unifSymbol_ = sig->findSymbol("_=?=_", 2);
  ttSymbol_ = sig->findSymbol("tt", 0);
}

const std::vector<int>& Theory::equationsFor(SymbolId symbol) const {
  static const std::vector<int> none;
  if (symbol < 0 || symbol >= static_cast<SymbolId>(eqsBySymbol_.size())) return none;
  return eqsBySymbol_[symbol];
}

std::map<std::string, SortId> Theory::declaredVars() const {
  std::map<std::string, SortId> out;
  for (const auto& v : vars) out[v.name] = v.sort;
  return out;
}

}  // namespace narwhal
