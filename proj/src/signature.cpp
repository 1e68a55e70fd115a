#include "narwhal/signature.hpp"

#include <algorithm>
#include <numeric>

#include "narwhal/error.hpp"

namespace narwhal {

AxTheory Symbol::theory() const {
  const bool id = attrs.idKind != IdentityKind::None;
  if (attrs.assoc && attrs.comm) {
    if (!id) return AxTheory::AC;
    return attrs.idKind == IdentityKind::Both ? AxTheory::ACU : AxTheory::Unsupported;
  }
  if (id) return AxTheory::Unsupported;
  if (attrs.assoc) return AxTheory::A;
  if (attrs.comm) return AxTheory::C;
  return AxTheory::Free;
}

namespace {

std::vector<std::string> mixfixTokens(const std::string& name) {
  std::vector<std::string> out;
  if (name.find('_') == std::string::npos) return out;
  std::string lit;
  auto flush = [&] {
    if (!lit.empty()) out.push_back(lit);
    lit.clear();
  };
  for (char c : name) {
    if (c == '_') {
      flush();
      out.emplace_back("_");
    } else if (c == ',' || c == '(' || c == ')') {
      flush();
      out.emplace_back(1, c);
    } else {
      lit.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace

SortId Signature::addSort(const std::string& name) {
  if (auto it = sortIndex_.find(name); it != sortIndex_.end()) return it->second;
  SortId id = static_cast<SortId>(sortNames_.size());
  sortNames_.push_back(name);
  sortIndex_[name] = id;
  return id;
}

void Signature::addSubsort(SortId sub, SortId super) {
  std::pair<SortId, SortId> p{sub, super};
  if (std::find(subsortDecls_.begin(), subsortDecls_.end(), p) == subsortDecls_.end())
    subsortDecls_.push_back(p);
}

void Signature::finalizeSorts() {
  const int n = numSorts();
  leq_.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) leq_[i][i] = true;
  for (auto [a, b] : subsortDecls_) leq_[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (leq_[i][k])
        for (int j = 0; j < n; ++j)
          if (leq_[k][j]) leq_[i][j] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && leq_[i][j] && leq_[j][i])
        throw Error(ErrorCode::CyclicSubsorts,
                    "cyclic subsort relation between " + sortNames_[i] + " and " + sortNames_[j]);

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : subsortDecls_) parent[find(a)] = find(b);
  kindOf_.assign(n, -1);
  kindRep_.clear();
  std::map<int, int> rootToKind;
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    auto [it, fresh] = rootToKind.emplace(r, static_cast<int>(kindRep_.size()));
    if (fresh) kindRep_.push_back(-1);
    kindOf_[i] = it->second;
  }
  // Representative: first maximal sort in declaration order.
  for (int i = 0; i < n; ++i) {
    int k = kindOf_[i];
    if (kindRep_[k] != -1) continue;
    bool maximal = true;
    for (int j = 0; j < n; ++j)
      if (j != i && kindOf_[j] == k && leq_[i][j]) maximal = false;
    if (maximal) kindRep_[k] = i;
  }
}

const std::string& Signature::sortName(SortId s) const {
  if (s < 0) return sortNames_.at(kindRep_.at(-s - 1));
  return sortNames_.at(s);
}

std::string Signature::sortLabel(SortId s) const {
  if (s < 0) return "[" + sortName(s) + "]";
  return sortNames_.at(s);
}

std::optional<SortId> Signature::findSort(const std::string& label) const {
  if (label.size() > 2 && label.front() == '[' && label.back() == ']') {
    auto inner = findSort(label.substr(1, label.size() - 2));
    if (!inner || *inner < 0) return std::nullopt;
    return kindSort(kindOf(*inner));
  }
  if (auto it = sortIndex_.find(label); it != sortIndex_.end()) return it->second;
  return std::nullopt;
}

int Signature::kindOf(SortId s) const {
  if (s < 0) return -s - 1;
  return kindOf_.at(s);
}

bool Signature::leq(SortId a, SortId b) const {
  if (a == b) return true;
  if (b < 0) return kindOf(a) == kindOf(b);
  if (a < 0) return false;
  return leq_[a][b];
}

std::vector<SortId> Signature::glb(SortId a, SortId b) const {
  if (kindOf(a) != kindOf(b)) return {};
  if (leq(a, b)) return {a};
  if (leq(b, a)) return {b};
  std::vector<SortId> lower;
  for (SortId c = 0; c < numSorts(); ++c)
    if (leq(c, a) && leq(c, b)) lower.push_back(c);
  std::vector<SortId> out;
  for (SortId c : lower) {
    bool maximal = true;
    for (SortId d : lower)
      if (d != c && leq(c, d)) maximal = false;
    if (maximal) out.push_back(c);
  }
  return out;
}

SymbolId Signature::addOp(const std::string& name, const std::vector<SortId>& domain,
                          SortId range, const OpAttributes& attrs) {
  const int arity = static_cast<int>(domain.size());
  auto sameKinds = [&](const Symbol& s) {
    if (s.poly() || attrs.poly) return s.poly() == attrs.poly;
    const auto& d = s.decls.front();
    if (kindOf(d.range) != kindOf(range)) return false;
    for (int i = 0; i < arity; ++i)
      if (kindOf(d.domain[i]) != kindOf(domain[i])) return false;
    return true;
  };
  OpDecl decl{domain, range};
  auto [lo, hi] = symbolIndex_.equal_range(name);
  for (auto it = lo; it != hi; ++it) {
    Symbol& s = symbols_[it->second];
    if (s.arity != arity || !sameKinds(s)) continue;
    if (!(s.attrs == attrs))
      throw Error(ErrorCode::DuplicateOpConflict,
                  "operator " + name + " redeclared with different attributes");
    if (std::find(s.decls.begin(), s.decls.end(), decl) == s.decls.end()) s.decls.push_back(decl);
    return it->second;
  }

  if ((attrs.assoc || attrs.comm || attrs.idKind != IdentityKind::None) && !attrs.poly) {
    if (arity != 2)
      throw Error(ErrorCode::BadAxiomAttribute, "axiom attributes on non-binary operator " + name);
    int k = kindOf(range);
    if (kindOf(domain[0]) != k || kindOf(domain[1]) != k)
      throw Error(ErrorCode::BadAxiomAttribute,
                  "operator " + name + " with axioms must have arguments and result in one kind");
  }
  Symbol s;
  s.name = name;
  s.arity = arity;
  s.mixfix = mixfixTokens(name);
  if (s.isMixfix()) {
    auto holes = std::count(s.mixfix.begin(), s.mixfix.end(), "_");
    if (holes != arity)
      throw Error(ErrorCode::SyntaxError, "operator " + name + " has " + std::to_string(holes) +
                                              " placeholders but arity " + std::to_string(arity));
  }
  s.decls.push_back(decl);
  s.attrs = attrs;
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(std::move(s));
  symbolIndex_.emplace(name, id);
  return id;
}

void Signature::finalizeOps() {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    Symbol& s = symbols_[i];
    if (s.attrs.idKind == IdentityKind::None) {
      s.identity.reset();
      continue;
    }
    std::optional<SymbolId> found;
    auto [lo, hi] = symbolIndex_.equal_range(s.attrs.identity);
    for (auto it = lo; it != hi; ++it) {
      const Symbol& c = symbols_[it->second];
      if (c.arity == 0 && kindOf(c.decls.front().range) == kindOf(s.decls.front().range))
        found = it->second;
    }
    if (!found)
      throw Error(ErrorCode::BadAxiomAttribute,
                  "identity " + s.attrs.identity + " of " + s.name + " is not a constant of its kind");
    s.identity = build(*found, {});
  }
}

void Signature::setAttributes(SymbolId id, const OpAttributes& attrs) {
  symbols_.at(id).attrs = attrs;
  if (attrs.idKind == IdentityKind::None) symbols_.at(id).identity.reset();
}

std::vector<SymbolId> Signature::findSymbols(const std::string& name) const {
  std::vector<SymbolId> out;
  auto [lo, hi] = symbolIndex_.equal_range(name);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<SymbolId> Signature::findSymbol(const std::string& name, int arity) const {
  for (SymbolId id : findSymbols(name))
    if (symbols_[id].arity == arity) return id;
  return std::nullopt;
}

Term Signature::makeVar(const Var& v) const {
  return std::make_shared<const TermNode>(TermNode::Private{}, v);
}

Term Signature::makeVar(const std::string& name, SortId sort, VarFamily family) const {
  Var v;
  v.family = family;
  v.name = name;
  v.sort = sort;
  return makeVar(v);
}

std::optional<SortId> Signature::binaryRange(const Symbol& sym, SortId a, SortId b) const {
  std::optional<SortId> best;
  for (const auto& d : sym.decls) {
    if (!leq(a, d.domain[0]) || !leq(b, d.domain[1])) continue;
    if (!best || leq(d.range, *best)) best = d.range;
  }
  return best;
}

std::optional<SortId> Signature::leastRange(SymbolId id, const std::vector<SortId>& argSorts) const {
  const Symbol& sym = symbols_.at(id);
  if (sym.poly()) return sym.decls.front().range;
  if (sym.assoc() && argSorts.size() >= 2) {
    std::optional<SortId> acc = argSorts[0];
    for (std::size_t i = 1; i < argSorts.size() && acc; ++i)
      acc = binaryRange(sym, *acc, argSorts[i]);
    return acc;
  }
  std::vector<SortId> candidates;
  for (const auto& d : sym.decls) {
    if (d.domain.size() != argSorts.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < argSorts.size() && ok; ++i) ok = leq(argSorts[i], d.domain[i]);
    if (ok) candidates.push_back(d.range);
  }
  if (candidates.empty()) return std::nullopt;
  for (SortId c : candidates) {
    bool least = true;
    for (SortId o : candidates) least = least && leq(c, o);
    if (least) return c;
  }
  std::string names;
  for (SortId c : candidates) names += " " + sortLabel(c);
  throw Error(ErrorCode::NoLeastSort, "no least sort for " + sym.name + "; candidates:" + names);
}

SortId Signature::argumentSort(SymbolId id) const {
  const Symbol& sym = symbols_.at(id);
  SortId best = sym.decls.front().domain.empty() ? sym.decls.front().range
                                                 : sym.decls.front().domain.front();
  for (const auto& d : sym.decls)
    if (!d.domain.empty() && leq(best, d.domain.front())) best = d.domain.front();
  return best;
}

bool Signature::rangeCanFit(SymbolId id, SortId sort) const {
  for (const auto& d : symbols_.at(id).decls)
    if (leq(d.range, sort)) return true;
  return false;
}

bool Signature::argKindsOk(const Symbol& sym, const std::vector<Term>& args) const {
  if (sym.poly()) return true;
  const auto& d = sym.decls.front();
  for (std::size_t i = 0; i < args.size(); ++i) {
    SortId expected = sym.assoc() ? d.domain[0] : d.domain[i];
    if (kindOf(args[i]->sort()) != kindOf(expected)) return false;
  }
  return true;
}

Term Signature::build(SymbolId id, std::vector<Term> args) const {
  const Symbol& sym = symbols_.at(id);
  std::vector<SortId> sorts;
  sorts.reserve(args.size());
  bool kindArg = false;
  for (const auto& a : args) {
    sorts.push_back(a->sort());
    kindArg = kindArg || isKindSort(a->sort());
  }
  std::optional<SortId> range = leastRange(id, sorts);
  bool ill = false;
  SortId sort;
  if (range) {
    sort = *range;
  } else {
    sort = kindSort(kindOf(sym.decls.front().range));
    ill = !kindArg;
  }
  return std::make_shared<const TermNode>(TermNode::Private{}, id, &sym.name, std::move(args), sort,
                                          ill);
}

std::optional<Term> Signature::tryApply(SymbolId id, std::vector<Term> args) const {
  const Symbol& sym = symbols_.at(id);
  if (sym.assoc()) {
    std::vector<Term> flat;
    flat.reserve(args.size() + 2);
    for (auto& a : args) {
      if (!a->isVar() && a->symbol() == id) {
        for (const auto& b : a->args()) flat.push_back(b);
      } else {
        flat.push_back(std::move(a));
      }
    }
    args = std::move(flat);
  } else if (static_cast<int>(args.size()) != sym.arity) {
    return std::nullopt;
  }
  if (!argKindsOk(sym, args)) return std::nullopt;
  if (sym.theory() == AxTheory::ACU && sym.identity) {
    std::erase_if(args, [&](const Term& a) { return termEqual(a, sym.identity); });
    if (args.empty()) return sym.identity;
    if (args.size() == 1) return args.front();
  }
  if (sym.assoc() && args.size() == 1) return args.front();
  if (sym.assoc() && args.empty()) return std::nullopt;
  if (sym.comm()) std::sort(args.begin(), args.end(), TermLess{});
  return build(id, std::move(args));
}

Term Signature::apply(SymbolId id, std::vector<Term> args) const {
  auto t = tryApply(id, std::move(args));
  if (!t) throw Error(ErrorCode::SortError, "ill-kinded application of " + symbols_.at(id).name);
  return *t;
}

Term Signature::constant(const std::string& name) const {
  auto id = findSymbol(name, 0);
  if (!id) throw Error(ErrorCode::UnknownOp, "unknown constant " + name);
  return apply(*id, {});
}

Term Signature::applyRaw(SymbolId id, std::vector<Term> args) const {
  return build(id, std::move(args));
}

Term Signature::canonicalize(const Term& t) const {
  if (t->isVar()) return t;
  std::vector<Term> args;
  args.reserve(t->arity());
  for (const auto& a : t->args()) args.push_back(canonicalize(a));
  return apply(t->symbol(), std::move(args));
}

}  // namespace narwhal
