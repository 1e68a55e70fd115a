#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "narwhal/term.hpp"

namespace narwhal {

enum class IdentityKind { None, Both, Left, Right };

/// The equational theory a symbol is matched/unified modulo.
enum class AxTheory { Free, C, A, AC, ACU, Unsupported };

struct OpDecl {
  std::vector<SortId> domain;
  SortId range = 0;
  bool operator==(const OpDecl&) const = default;
};

struct OpAttributes {
  bool assoc = false;
  bool comm = false;
  IdentityKind idKind = IdentityKind::None;
  std::string identity;  // name of the identity constant
  bool poly = false;
  bool operator==(const OpAttributes&) const = default;
};

struct Symbol {
  std::string name;  // as declared, e.g. "_@_", "__", "s"
  int arity = 0;
  std::vector<std::string> mixfix;  // "_" marks a hole; empty for prefix syntax
  std::vector<OpDecl> decls;
  OpAttributes attrs;
  Term identity;  // resolved identity element, when attrs.idKind != None

  bool isMixfix() const { return !mixfix.empty(); }
  bool assoc() const { return attrs.assoc; }
  bool comm() const { return attrs.comm; }
  bool poly() const { return attrs.poly; }
  AxTheory theory() const;
};

/// Order-sorted signature: sorts with their subsort closure and kinds, plus
/// operator symbols. Regular sorts have ids >= 0; the kind sort of kind k has
/// id -(k + 1), so appending sorts or kinds never invalidates existing terms.
class Signature {
 public:
  // --- construction -------------------------------------------------------
  SortId addSort(const std::string& name);
  void addSubsort(SortId sub, SortId super);
  /// Computes the subsort closure and kinds; throws CyclicSubsorts.
  void finalizeSorts();
  /// Adds (or merges into) a symbol. Identical redeclarations are idempotent.
  SymbolId addOp(const std::string& name, const std::vector<SortId>& domain, SortId range,
                 const OpAttributes& attrs);
  /// Resolves identity constants and validates axiom attributes.
  void finalizeOps();
  /// Replaces the attributes of an existing symbol (theory transformations).
  void setAttributes(SymbolId id, const OpAttributes& attrs);

  // --- sorts --------------------------------------------------------------
  int numSorts() const { return static_cast<int>(sortNames_.size()); }
  int numKinds() const { return static_cast<int>(kindRep_.size()); }
  const std::string& sortName(SortId s) const;
  std::string sortLabel(SortId s) const;  // "Int" or "[Int]"
  std::optional<SortId> findSort(const std::string& label) const;
  bool isKindSort(SortId s) const { return s < 0; }
  int kindOf(SortId s) const;
  SortId kindSort(int kind) const { return -(kind + 1); }
  bool leq(SortId a, SortId b) const;
  /// Maximal common lower bounds.
  std::vector<SortId> glb(SortId a, SortId b) const;
  /// Direct subsort pairs in declaration order (for printing).
  const std::vector<std::pair<SortId, SortId>>& subsortDecls() const { return subsortDecls_; }

  // --- symbols ------------------------------------------------------------
  std::size_t numSymbols() const { return symbols_.size(); }
  const Symbol& symbol(SymbolId id) const { return symbols_.at(id); }
  std::vector<SymbolId> findSymbols(const std::string& name) const;
  std::optional<SymbolId> findSymbol(const std::string& name, int arity) const;

  // --- terms --------------------------------------------------------------
  Term makeVar(const Var& v) const;
  Term makeVar(const std::string& name, SortId sort, VarFamily family = VarFamily::User) const;
  /// Canonicalizing constructor: flattens assoc arguments, drops ACU
  /// identities, sorts comm arguments. Throws SortError on kind mismatch.
  Term apply(SymbolId id, std::vector<Term> args) const;
  std::optional<Term> tryApply(SymbolId id, std::vector<Term> args) const;
  Term constant(const std::string& name) const;
  /// Builds a node exactly as given, skipping canonicalization. Only
  /// meaningful as input to `canonicalize`.
  Term applyRaw(SymbolId id, std::vector<Term> args) const;
  Term canonicalize(const Term& t) const;

  /// Least sort of a (flattened) application with the given argument sorts;
  /// nullopt when only kind-level typing exists.
  std::optional<SortId> leastRange(SymbolId id, const std::vector<SortId>& argSorts) const;
  /// Result sort used for fresh variables standing for argument lists.
  SortId argumentSort(SymbolId id) const;
  /// True when some declaration of the symbol has range <= sort.
  bool rangeCanFit(SymbolId id, SortId sort) const;

 private:
  std::optional<SortId> binaryRange(const Symbol& sym, SortId a, SortId b) const;
  bool argKindsOk(const Symbol& sym, const std::vector<Term>& args) const;
  Term build(SymbolId id, std::vector<Term> args) const;

  std::vector<std::string> sortNames_;
  std::map<std::string, SortId> sortIndex_;
  std::vector<std::pair<SortId, SortId>> subsortDecls_;
  std::vector<std::vector<bool>> leq_;
  std::vector<int> kindOf_;
  std::vector<SortId> kindRep_;
  std::deque<Symbol> symbols_;  // stable addresses: terms point at names
  std::multimap<std::string, SymbolId> symbolIndex_;
};

}  // namespace narwhal
