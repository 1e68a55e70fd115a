#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "narwhal/theory.hpp"

namespace narwhal {

struct Token {
  std::string text;
  int line = 1;
  int col = 1;
};

/// Splits surface text into tokens. `(`, `)`, `,`, `[`, `]` stand alone,
/// except that `name:[Sort]` stays one token. `***` and `---` start a
/// comment running to the end of the line.
std::vector<Token> tokenize(std::string_view text);

/// How bare identifiers and `name:Sort` tokens become variables.
struct TermContext {
  const std::map<std::string, SortId>* declared = nullptr;
  VarFamily declaredFamily = VarFamily::User;
  VarFamily inlineFamily = VarFamily::User;
};

Term parseTerm(const Signature& sig, std::string_view text, const TermContext& ctx = {});
Term parseTerm(const Signature& sig, const std::vector<Token>& tokens, const TermContext& ctx);
/// User-level term: module variables may be used by their bare names.
Term parseTerm(const Theory& theory, std::string_view text);

/// All parses of the text (deduplicated canonical terms), without the
/// least-sort tie break. Used by tests as a parser oracle hook.
std::vector<Term> parseAlternatives(const Signature& sig, std::string_view text,
                                    const TermContext& ctx = {});

std::string printVar(const Signature& sig, const Var& v, const TermContext* ctx = nullptr);
/// Mixfix rendering with the fewest parentheses that still reparse to the
/// same term under `ctx`; falls back to full parenthesization.
std::string printTerm(const Signature& sig, const Term& t, const TermContext& ctx = {});
std::string printTerm(const Theory& theory, const Term& t);
/// Fully parenthesized rendering; no verification.
std::string printTermRaw(const Signature& sig, const Term& t);

/// `{X:Int / 0, Y:Int / s(Z:Int)}` in variable order.
std::string printSubstitution(const Signature& sig, const Substitution& s,
                              const TermContext& ctx = {});

/// `allowReserved` accepts the `_=?=_`/`tt` declarations that the
/// transformation introduces (used to read back transformed programs).
TheoryPtr parseModule(std::string_view text, bool allowReserved = false);
std::string printTheory(const Theory& theory);

TermContext statementContext(const std::map<std::string, SortId>& declared);

}  // namespace narwhal
