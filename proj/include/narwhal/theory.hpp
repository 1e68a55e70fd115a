#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "narwhal/signature.hpp"
#include "narwhal/substitution.hpp"
#include "narwhal/term.hpp"

namespace narwhal {

/// Oriented equation (used left to right only).
struct Equation {
  std::string label;
  bool printLabel = true;
  Term lhs;
  Term rhs;
  bool variant = false;  // usable for folding variant narrowing
  SymbolId attachedTo = -1;  // printed right after this operator's declaration
  bool hidden = false;       // internal identity compilation, never printed
};

struct Rule {
  std::string label;
  bool generatedLabel = false;
  Term lhs;
  Term rhs;
  bool narrowing = false;
};

struct VarDecl {
  std::string name;
  SortId sort = 0;
};

/// A rewrite theory (signature, oriented equations, axioms on operator
/// declarations, rules). Immutable once `prepare()` has run; shared by
/// pointer between sessions.
class Theory {
 public:
  std::string name;
  std::shared_ptr<Signature> sig;
  std::vector<VarDecl> vars;
  std::vector<Equation> equations;
  std::vector<Rule> rules;
  /// Sort ids to omit from the printed `sorts` line (none for parsed modules).
  int printedSortCount = -1;
  /// Attributes to print instead of the signature's (identity compiled away
  /// internally but still shown as declared).
  std::map<SymbolId, OpAttributes> printedAttrs;

  const Signature& signature() const { return *sig; }

  /// Builds lookup tables; call after the equation list is final.
  void prepare();

  /// Equation indices whose left-hand side is headed by `symbol`, in
  /// declaration order.
  const std::vector<int>& equationsFor(SymbolId symbol) const;
  const std::vector<int>& variantEquations() const { return variantEqs_; }
  std::map<std::string, SortId> declaredVars() const;

  std::optional<SymbolId> unificationSymbol() const { return unifSymbol_; }
  std::optional<SymbolId> successSymbol() const { return ttSymbol_; }

 private:
  std::vector<std::vector<int>> eqsBySymbol_;
  std::vector<int> variantEqs_;
  std::optional<SymbolId> unifSymbol_;
  std::optional<SymbolId> ttSymbol_;
};

using TheoryPtr = std::shared_ptr<const Theory>;

}  // namespace narwhal
