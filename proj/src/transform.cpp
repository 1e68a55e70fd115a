#include "narwhal/transform.hpp"

#include "narwhal/error.hpp"

namespace narwhal {

namespace {

std::shared_ptr<Theory> cloneTheory(const Theory& src) {
  auto out = std::make_shared<Theory>(src);
  out->sig = std::make_shared<Signature>(*src.sig);
  out->sig->finalizeOps();
  return out;
}

// Rebuilds every term against the theory's own signature.
void rebuildTerms(Theory& th) {
  const Signature& sig = *th.sig;
  for (auto& e : th.equations) {
    e.lhs = sig.canonicalize(e.lhs);
    e.rhs = sig.canonicalize(e.rhs);
  }
  for (auto& r : th.rules) {
    r.lhs = sig.canonicalize(r.lhs);
    r.rhs = sig.canonicalize(r.rhs);
  }
}

Term var(const Signature& sig, const std::string& name, SortId sort) {
  return sig.makeVar(name, sort, VarFamily::User);
}

}  // namespace

Transformed addUnificationInfrastructure(const Theory& theory) {
  const Signature& old = theory.signature();
  if (old.findSymbol("_=?=_", 2) || old.findSymbol("tt", 0))
    throw Error(ErrorCode::NameClash, "the unification operators _=?=_ and tt are already declared");
  auto th = cloneTheory(theory);
  Signature& sig = *th->sig;
  Transformed result;

  const int userKinds = sig.numKinds();
  SortId boolSort;
  if (auto b = sig.findSort("Bool")) {
    boolSort = *b;
  } else {
    boolSort = sig.addSort("Bool");
    sig.finalizeSorts();
  }
  const int boolKind = sig.kindOf(boolSort);
  const SortId boolKindSort = sig.kindSort(boolKind);

  OpAttributes poly;
  poly.poly = true;
  SymbolId unif = sig.addOp("_=?=_", {boolKindSort, boolKindSort}, boolKindSort, poly);
  SymbolId tt = sig.addOp("tt", {}, boolKindSort, {});
  sig.finalizeOps();
  result.report.addedOps = {"_=?=_", "tt"};
  rebuildTerms(*th);

  std::vector<int> kinds{boolKind};
  for (int k = 0; k < userKinds; ++k)
    if (k != boolKind) kinds.push_back(k);
  Term success = sig.apply(tt, {});
  for (int k : kinds) {
    Term x = var(sig, "X", sig.kindSort(k));
    Equation e;
    e.label = "unif";
    e.printLabel = false;
    e.lhs = sig.apply(unif, {x, x});
    e.rhs = success;
    e.variant = true;
    th->equations.push_back(std::move(e));
    result.report.addedEquations.push_back("unif " + sig.sortLabel(sig.kindSort(k)));
  }
  th->prepare();
  result.theory = th;
  return result;
}

Transformed transformAU(const Theory& theory) {
  auto th = cloneTheory(theory);
  Signature& sig = *th->sig;
  Transformed result;
  std::vector<Equation> added;

  for (SymbolId id = 0; id < static_cast<SymbolId>(sig.numSymbols()); ++id) {
    const Symbol sym = sig.symbol(id);
    const IdentityKind idKind = sym.attrs.idKind;
    if (idKind == IdentityKind::None) continue;
    if (sym.attrs.assoc && sym.attrs.comm) continue;  // ACU is native
    if (sym.attrs.assoc && idKind != IdentityKind::Both)
      throw Error(ErrorCode::UnsupportedAxCombination,
                  "assoc with a one-sided identity on " + sym.name + " is not supported");
    Term e = sym.identity;
    SortId s = sig.argumentSort(id);
    OpAttributes attrs = sym.attrs;
    attrs.idKind = IdentityKind::None;
    attrs.identity.clear();
    const bool hidden = !sym.attrs.assoc;
    if (hidden) {
      th->printedAttrs[id] = sym.attrs;
    } else {
      result.report.replacedOps.push_back(sym.name);
    }
    sig.setAttributes(id, attrs);

    // terms built against the new attributes
    Term x = var(sig, "X", s), y = var(sig, "Y", s);
    Term ex = sig.apply(id, {sig.canonicalize(e), x});
    Term xe = sig.apply(id, {x, sig.canonicalize(e)});
    auto push = [&](const std::string& label, Term lhs, Term rhs) {
      Equation eq;
      eq.label = label;
      eq.lhs = std::move(lhs);
      eq.rhs = std::move(rhs);
      eq.variant = true;
      eq.attachedTo = id;
      eq.hidden = hidden;
      added.push_back(std::move(eq));
      result.report.addedEquations.push_back(label + " " + sym.name);
    };
    if (sym.attrs.assoc) {
      push("AU1", ex, x);
      push("AU2", xe, x);
      push("AU3", sig.apply(id, {x, sig.canonicalize(e), y}), sig.apply(id, {x, y}));
    } else if (sym.attrs.comm) {
      push("CU1", ex, x);
      push("CU2", xe, x);
    } else {
      if (idKind != IdentityKind::Right) push(idKind == IdentityKind::Both ? "U1" : "Ul", ex, x);
      if (idKind != IdentityKind::Left) push(idKind == IdentityKind::Both ? "U2" : "Ur", xe, x);
    }
  }
  if (added.empty()) {
    result.theory = std::make_shared<const Theory>(theory);
    return result;
  }
  rebuildTerms(*th);
  for (auto& e : added) {
    e.lhs = sig.canonicalize(e.lhs);
    e.rhs = sig.canonicalize(e.rhs);
  }
  // identity equations go first so that they fire before user equations
  th->equations.insert(th->equations.begin(), added.begin(), added.end());
  th->prepare();
  result.theory = th;
  return result;
}

Transformed transformTheory(const Theory& theory) {
  Transformed au = transformAU(theory);
  Transformed full = addUnificationInfrastructure(*au.theory);
  full.report.replacedOps = au.report.replacedOps;
  auto eqs = au.report.addedEquations;
  eqs.insert(eqs.end(), full.report.addedEquations.begin(), full.report.addedEquations.end());
  full.report.addedEquations = eqs;
  full.report.diagnostics = checkExecutability(*full.theory);
  return full;
}

int extraVariableCount(const Rule& rule) {
  VarSet l = varsOf(rule.lhs);
  int n = 0;
  for (const auto& v : varsOf(rule.rhs))
    if (!l.count(v)) ++n;
  return n;
}

std::vector<Diagnostic> checkExecutability(const Theory& theory) {
  const Signature& sig = theory.signature();
  std::vector<Diagnostic> out;
  // kinds that occur as an argument of some (non-polymorphic) operator
  std::vector<bool> nested(sig.numKinds(), false);
  for (SymbolId id = 0; id < static_cast<SymbolId>(sig.numSymbols()); ++id) {
    const Symbol& s = sig.symbol(id);
    if (s.poly()) continue;
    for (const auto& d : s.decls)
      for (SortId a : d.domain) nested[sig.kindOf(a)] = true;
  }
  for (const auto& r : theory.rules) {
    if (!r.narrowing) continue;
    int k = sig.kindOf(r.lhs->sort());
    if (r.lhs->isVar() || nested[k]) {
      out.push_back({Diagnostic::Level::Warning, "non-topmost",
                     "rule " + r.label + " on kind " + sig.sortLabel(sig.kindSort(k)) +
                         " is non-topmost: narrowing completeness not guaranteed"});
    }
    int extra = extraVariableCount(r);
    if (extra > 0)
      out.push_back({Diagnostic::Level::Info, "extra-variables",
                     "rule " + r.label + " has " + std::to_string(extra) + " extra right-hand side variable(s)"});
  }
  for (SymbolId id = 0; id < static_cast<SymbolId>(sig.numSymbols()); ++id) {
    const Symbol& s = sig.symbol(id);
    if (s.theory() == AxTheory::Unsupported)
      out.push_back({Diagnostic::Level::Error, "unsupported-axioms",
                     "unsupported axiom combination on " + s.name});
  }
  return out;
}

}  // namespace narwhal
