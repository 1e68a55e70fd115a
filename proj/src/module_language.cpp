#include "narwhal/module_language.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <optional>
#include <set>

#include "narwhal/error.hpp"

namespace narwhal {

namespace {

bool isSpecialChar(char c) { return std::strchr("(),[]", c) != nullptr; }

bool isPunct(const std::string& s) {
  return s == "(" || s == ")" || s == "," || s == "[" || s == "]";
}

std::string where(const Token& t) {
  return "line " + std::to_string(t.line) + ", col " + std::to_string(t.col);
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (text.substr(i, 3) == "***" || text.substr(i, 3) == "---") {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (isSpecialChar(c)) {
      out.push_back({std::string(1, c), line, col});
      ++i;
      ++col;
      continue;
    }
    Token tok{{}, line, col};
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) && !isSpecialChar(text[i])) {
      tok.text.push_back(text[i]);
      ++i;
      ++col;
      if (tok.text.back() == ':' && i < n && text[i] == '[') {
        std::size_t close = text.find(']', i);
        if (close == std::string_view::npos)
          throw Error(ErrorCode::SyntaxError, where(tok) + ": unterminated kind in " + tok.text);
        tok.text.append(text.substr(i, close + 1 - i));
        col += static_cast<int>(close + 1 - i);
        i = close + 1;
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term parsing

namespace {

constexpr std::size_t kMaxAlternatives = 64;

class TermParser {
 public:
  TermParser(const Signature& sig, const std::vector<Token>& toks, const TermContext& ctx)
      : sig_(sig), toks_(toks), ctx_(ctx), n_(static_cast<int>(toks.size())) {
    match_.assign(n_, -1);
    std::vector<int> stack;
    for (int k = 0; k < n_; ++k) {
      if (toks_[k].text == "(") stack.push_back(k);
      if (toks_[k].text == ")") {
        if (stack.empty())
          throw Error(ErrorCode::SyntaxError, where(toks_[k]) + ": unbalanced ')'");
        match_[stack.back()] = k;
        match_[k] = stack.back();
        stack.pop_back();
      }
    }
    if (!stack.empty())
      throw Error(ErrorCode::SyntaxError, where(toks_[stack.back()]) + ": unbalanced '('");
    // bal_[i][j]: tokens [i, j) form a parenthesis-balanced span.
    bal_.assign(n_ + 1, std::vector<char>(n_ + 1, 0));
    for (int i = 0; i < n_; ++i) {
      int depth = 0;
      for (int j = i; j < n_; ++j) {
        if (toks_[j].text == "(") ++depth;
        if (toks_[j].text == ")") --depth;
        if (depth < 0) break;
        if (depth == 0) bal_[i][j + 1] = 1;
      }
    }
    memo_.assign(static_cast<std::size_t>((n_ + 1) * (n_ + 1)), std::nullopt);
    for (std::size_t id = 0; id < sig_.numSymbols(); ++id)
      if (sig_.symbol(static_cast<SymbolId>(id)).isMixfix()) mixfix_.push_back(static_cast<SymbolId>(id));
    checkTokens();
  }

  std::vector<Term> all() {
    if (n_ == 0) throw Error(ErrorCode::SyntaxError, "empty term");
    return span(0, n_);
  }

  Term unique() {
    auto alts = all();
    if (alts.empty()) {
      if (sawIllSorted_)
        throw Error(ErrorCode::SortError, "term is not well sorted: " + text(0, n_));
      throw Error(ErrorCode::SyntaxError, where(toks_[0]) + ": no parse for " + text(0, n_));
    }
    if (alts.size() == 1) return alts.front();
    std::vector<Term> least;
    for (const auto& a : alts) {
      bool below = true;
      for (const auto& b : alts) below = below && sig_.leq(a->sort(), b->sort());
      if (below) least.push_back(a);
    }
    if (least.size() == 1) return least.front();
    std::string msg = "ambiguous term " + text(0, n_) + "; parses:";
    for (const auto& a : alts) msg += "\n  " + printTermRaw(sig_, a);
    throw Error(ErrorCode::AmbiguousParse, msg);
  }

 private:
  std::string text(int i, int j) const {
    std::string s;
    for (int k = i; k < j; ++k) s += (k > i ? " " : "") + toks_[k].text;
    return s;
  }

  void checkTokens() {
    std::set<std::string> known;
    for (std::size_t id = 0; id < sig_.numSymbols(); ++id) {
      const Symbol& s = sig_.symbol(static_cast<SymbolId>(id));
      known.insert(s.name);
      for (const auto& piece : s.mixfix) known.insert(piece);
    }
    for (const auto& t : toks_) {
      if (isPunct(t.text) || known.count(t.text)) continue;
      if (ctx_.declared && ctx_.declared->count(t.text)) continue;
      if (varToken(t)) continue;
      throw Error(ErrorCode::UnknownOp, where(t) + ": unknown operator or variable " + t.text);
    }
  }

  std::optional<Term> varToken(const Token& tok) {
    const std::string& s = tok.text;
    auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size()) return std::nullopt;
    std::string name = s.substr(0, colon);
    std::string sortText = s.substr(colon + 1);
    auto sort = sig_.findSort(sortText);
    if (!sort) throw Error(ErrorCode::UnknownSort, where(tok) + ": unknown sort " + sortText);
    Var v;
    v.sort = *sort;
    if ((name[0] == '#' || name[0] == '%') && name.size() > 1 &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      v.family = name[0] == '#' ? VarFamily::Unifier : VarFamily::Rule;
      v.index = std::stoi(name.substr(1));
    } else {
      v.family = ctx_.inlineFamily;
      v.name = name;
    }
    return sig_.makeVar(v);
  }

  void add(std::vector<Term>& alts, const Term& t) {
    if (t->illSorted()) {
      sawIllSorted_ = true;
      return;
    }
    for (const auto& a : alts)
      if (termEqual(a, t)) return;
    if (alts.size() < kMaxAlternatives) alts.push_back(t);
  }

  const std::vector<Term>& span(int i, int j) {
    auto& slot = memo_[static_cast<std::size_t>(i * (n_ + 1) + j)];
    if (slot) return *slot;
    slot.emplace();  // guards against re-entry on the same span
    std::vector<Term> alts;
    compute(i, j, alts);
    auto& again = memo_[static_cast<std::size_t>(i * (n_ + 1) + j)];
    again = std::move(alts);
    return *again;
  }

  void compute(int i, int j, std::vector<Term>& alts) {
    const std::string& first = toks_[i].text;
    if (j - i == 1) {
      if (isPunct(first)) return;
      if (auto v = varToken(toks_[i])) {
        add(alts, *v);
        return;
      }
      if (ctx_.declared) {
        auto it = ctx_.declared->find(first);
        if (it != ctx_.declared->end()) add(alts, sig_.makeVar(first, it->second, ctx_.declaredFamily));
      }
      for (SymbolId id : sig_.findSymbols(first))
        if (sig_.symbol(id).arity == 0)
          if (auto t = sig_.tryApply(id, {})) add(alts, *t);
      return;
    }
    if (first == "(" && match_[i] == j - 1) {
      for (const auto& t : span(i + 1, j - 1)) add(alts, t);
    }
    if (j - i >= 3 && !isPunct(first) && toks_[i + 1].text == "(" && match_[i + 1] == j - 1) {
      prefix(i, j, alts);
    }
    for (SymbolId id : mixfix_) {
      const Symbol& sym = sig_.symbol(id);
      const auto& pat = sym.mixfix;
      if (pat.front() != "_" && pat.front() != first) continue;
      if (pat.back() != "_" && pat.back() != toks_[j - 1].text) continue;
      if (static_cast<int>(pat.size()) > j - i) continue;
      std::vector<std::pair<int, int>> holes;
      matchPattern(id, 0, i, j, holes, alts);
    }
  }

  void prefix(int i, int j, std::vector<Term>& alts) {
    std::vector<std::pair<int, int>> argSpans;
    int start = i + 2;
    for (int k = i + 2; k < j - 1; ++k) {
      if (toks_[k].text == "(") {
        k = match_[k];
        continue;
      }
      if (toks_[k].text == ",") {
        argSpans.emplace_back(start, k);
        start = k + 1;
      }
    }
    argSpans.emplace_back(start, j - 1);
    for (auto [a, b] : argSpans)
      if (a >= b) return;
    for (SymbolId id : sig_.findSymbols(toks_[i].text)) {
      if (sig_.symbol(id).arity != static_cast<int>(argSpans.size())) continue;
      combine(id, argSpans, alts);
    }
  }

  void matchPattern(SymbolId id, std::size_t p, int k, int j, std::vector<std::pair<int, int>>& holes,
                    std::vector<Term>& alts) {
    const auto& pat = sig_.symbol(id).mixfix;
    if (p == pat.size()) {
      if (k == j) combine(id, holes, alts);
      return;
    }
    if (k >= j) return;
    if (pat[p] != "_") {
      if (toks_[k].text == pat[p]) matchPattern(id, p + 1, k + 1, j, holes, alts);
      return;
    }
    if (p + 1 == pat.size()) {
      if (!bal_[k][j] || span(k, j).empty()) return;
      holes.emplace_back(k, j);
      matchPattern(id, p + 1, j, j, holes, alts);
      holes.pop_back();
      return;
    }
    std::size_t rest = pat.size() - p - 1;
    for (int e = k + 1; e + static_cast<int>(rest) <= j; ++e) {
      if (pat[p + 1] != "_" && toks_[e].text != pat[p + 1]) continue;
      if (!bal_[k][e] || span(k, e).empty()) continue;
      holes.emplace_back(k, e);
      matchPattern(id, p + 1, e, j, holes, alts);
      holes.pop_back();
    }
  }

  void combine(SymbolId id, const std::vector<std::pair<int, int>>& spans, std::vector<Term>& alts) {
    std::vector<const std::vector<Term>*> choices;
    for (auto [a, b] : spans) {
      choices.push_back(&span(a, b));
      if (choices.back()->empty()) return;
    }
    std::vector<std::size_t> idx(spans.size(), 0);
    while (true) {
      std::vector<Term> args;
      args.reserve(spans.size());
      for (std::size_t h = 0; h < spans.size(); ++h) args.push_back((*choices[h])[idx[h]]);
      try {
        if (auto t = sig_.tryApply(id, std::move(args))) {
          add(alts, *t);
        } else {
          sawIllSorted_ = true;
        }
      } catch (const Error&) {
        // no least sort for this combination
      }
      std::size_t h = 0;
      while (h < idx.size() && ++idx[h] == choices[h]->size()) idx[h++] = 0;
      if (h == idx.size()) break;
    }
  }

  const Signature& sig_;
  const std::vector<Token>& toks_;
  TermContext ctx_;
  int n_;
  std::vector<int> match_;
  std::vector<std::vector<char>> bal_;
  std::vector<std::optional<std::vector<Term>>> memo_;
  std::vector<SymbolId> mixfix_;
  bool sawIllSorted_ = false;
};

bool hasMixfix(const Signature& sig, const Term& t) {
  if (t->isVar()) return false;
  if (t->arity() > 0 && sig.symbol(t->symbol()).isMixfix()) return true;
  for (const auto& a : t->args())
    if (hasMixfix(sig, a)) return true;
  return false;
}

}  // namespace

Term parseTerm(const Signature& sig, const std::vector<Token>& tokens, const TermContext& ctx) {
  TermParser parser(sig, tokens, ctx);
  return parser.unique();
}

Term parseTerm(const Signature& sig, std::string_view text, const TermContext& ctx) {
  return parseTerm(sig, tokenize(text), ctx);
}

Term parseTerm(const Theory& theory, std::string_view text) {
  auto declared = theory.declaredVars();
  TermContext ctx;
  ctx.declared = &declared;
  return parseTerm(theory.signature(), text, ctx);
}

std::vector<Term> parseAlternatives(const Signature& sig, std::string_view text,
                                    const TermContext& ctx) {
  auto toks = tokenize(text);
  TermParser parser(sig, toks, ctx);
  return parser.all();
}

TermContext statementContext(const std::map<std::string, SortId>& declared) {
  TermContext ctx;
  ctx.declared = &declared;
  ctx.declaredFamily = VarFamily::Pattern;
  ctx.inlineFamily = VarFamily::Pattern;
  return ctx;
}

// ---------------------------------------------------------------------------
// Printing

std::string printVar(const Signature& sig, const Var& v, const TermContext* ctx) {
  switch (v.family) {
    case VarFamily::Unifier:
      return "#" + std::to_string(v.index) + ":" + sig.sortLabel(v.sort);
    case VarFamily::Rule:
      return "%" + std::to_string(v.index) + ":" + sig.sortLabel(v.sort);
    case VarFamily::Pattern:
      if (ctx && ctx->declared && ctx->declaredFamily == VarFamily::Pattern) {
        auto it = ctx->declared->find(v.name);
        if (it != ctx->declared->end() && it->second == v.sort) return v.name;
      }
      break;
    case VarFamily::User:
      break;
  }
  return v.name + ":" + sig.sortLabel(v.sort);
}

namespace {

class Printer {
 public:
  Printer(const Signature& sig, const TermContext* ctx, bool full) : sig_(sig), ctx_(ctx), full_(full) {}

  std::string render(const Term& t) {
    if (t->isVar()) return printVar(sig_, t->var(), ctx_);
    const Symbol& sym = sig_.symbol(t->symbol());
    if (t->arity() == 0) return sym.name;
    if (!sym.isMixfix()) {
      std::string s = sym.name + "(";
      for (std::size_t k = 0; k < t->arity(); ++k) s += (k ? ", " : "") + render(t->args()[k]);
      return s + ")";
    }
    std::vector<std::string> pat = expand(sym, t->arity());
    std::vector<std::string> pieces;
    std::size_t h = 0;
    for (std::size_t q = 0; q < pat.size(); ++q) {
      if (pat[q] != "_") {
        pieces.push_back(pat[q]);
        continue;
      }
      const Term& arg = t->args()[h++];
      bool leftOpen = sym.assoc() || q == 0 || pat[q - 1] == "_";
      bool rightOpen = sym.assoc() || q + 1 == pat.size() || pat[q + 1] == "_";
      std::string s = render(arg);
      if (needsParens(t, arg, leftOpen, rightOpen)) s = "(" + s + ")";
      pieces.push_back(std::move(s));
    }
    std::string out;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (k > 0 && pieces[k] != ",") out += ' ';
      out += pieces[k];
    }
    return out;
  }

 private:
  static std::vector<std::string> expand(const Symbol& sym, std::size_t n) {
    if (!sym.assoc() || n <= 2) return sym.mixfix;
    const auto& pat = sym.mixfix;
    auto first = std::find(pat.begin(), pat.end(), "_");
    auto second = std::find(first + 1, pat.end(), "_");
    std::vector<std::string> out(pat.begin(), first + 1);
    for (std::size_t k = 1; k < n; ++k) {
      out.insert(out.end(), first + 1, second);
      out.push_back("_");
    }
    out.insert(out.end(), second + 1, pat.end());
    return out;
  }

  bool needsParens(const Term& parent, const Term& arg, bool leftOpen, bool rightOpen) const {
    if (arg->isVar() || arg->arity() == 0) return false;
    const Symbol& a = sig_.symbol(arg->symbol());
    if (!a.isMixfix()) return false;
    if (full_) return true;
    bool clash = (leftOpen && a.mixfix.front() == "_") || (rightOpen && a.mixfix.back() == "_");
    if (!clash) return false;
    return sig_.kindOf(arg->sort()) == sig_.kindOf(parent->sort());
  }

  const Signature& sig_;
  const TermContext* ctx_;
  bool full_;
};

}  // namespace

std::string printTermRaw(const Signature& sig, const Term& t) {
  Printer p(sig, nullptr, true);
  return p.render(t);
}

std::string printTerm(const Signature& sig, const Term& t, const TermContext& ctx) {
  Printer minimal(sig, &ctx, false);
  std::string s = minimal.render(t);
  if (!hasMixfix(sig, t)) return s;
  auto reparses = [&](const std::string& text) {
    try {
      return termEqual(parseTerm(sig, text, ctx), t);
    } catch (const Error&) {
      return false;
    }
  };
  if (reparses(s)) return s;
  Printer full(sig, &ctx, true);
  return full.render(t);
}

std::string printTerm(const Theory& theory, const Term& t) {
  auto declared = theory.declaredVars();
  TermContext ctx;
  ctx.declared = &declared;
  return printTerm(theory.signature(), t, ctx);
}

std::string printSubstitution(const Signature& sig, const Substitution& s, const TermContext& ctx) {
  std::string out = "{";
  bool firstBinding = true;
  for (const auto& [v, t] : s) {
    if (!firstBinding) out += ", ";
    firstBinding = false;
    out += printVar(sig, v) + " / " + printTerm(sig, t, ctx);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Modules

namespace {

using Tokens = std::vector<Token>;

struct RawOp {
  std::vector<std::string> names;
  std::vector<std::string> domain;
  std::string range;
  OpAttributes attrs;
  Token at;
};

struct RawStatement {
  bool isRule = false;
  std::string label;
  Tokens lhs;
  Tokens rhs;
  bool flag = false;  // variant / narrowing
  Token at;
};

[[noreturn]] void syntax(const Token& t, const std::string& msg) {
  throw Error(ErrorCode::SyntaxError, where(t) + ": " + msg);
}

[[noreturn]] void unsupported(const Token& t, const std::string& what) {
  throw Error(ErrorCode::UnsupportedFeature, where(t) + ": unsupported feature: " + what);
}

// Reads a sort reference starting at k: `Name` or `[ Name ]`.
std::string readSort(const Tokens& s, std::size_t& k) {
  if (k >= s.size()) syntax(s.back(), "sort expected");
  if (s[k].text == "[") {
    if (k + 2 >= s.size() || s[k + 2].text != "]") syntax(s[k], "malformed kind");
    std::string label = "[" + s[k + 1].text + "]";
    k += 3;
    return label;
  }
  if (isPunct(s[k].text)) syntax(s[k], "sort expected, found " + s[k].text);
  return s[k++].text;
}

OpAttributes parseOpAttributes(const Tokens& s, std::size_t begin, std::size_t end) {
  OpAttributes a;
  for (std::size_t k = begin; k < end; ++k) {
    const std::string& w = s[k].text;
    if (w == "assoc") {
      a.assoc = true;
    } else if (w == "comm") {
      a.comm = true;
    } else if (w == "ctor") {
      // constructor marker, no operational meaning here
    } else if (w == "id:" || ((w == "left" || w == "right") && k + 1 < end && s[k + 1].text == "id:")) {
      a.idKind = w == "left" ? IdentityKind::Left : w == "right" ? IdentityKind::Right : IdentityKind::Both;
      if (w != "id:") ++k;
      if (k + 1 >= end) syntax(s[k], "identity element expected");
      a.identity = s[++k].text;
      if (k + 1 < end && s[k + 1].text == "(") unsupported(s[k], "non-constant identity element");
    } else if (w == "poly") {
      a.poly = true;
      if (k + 1 < end && s[k + 1].text == "(") {
        k += 2;
        while (k < end && s[k].text != ")") ++k;
      }
    } else {
      unsupported(s[k], "operator attribute " + w);
    }
  }
  return a;
}

RawOp parseOpDecl(const Tokens& s) {
  RawOp op;
  op.at = s.front();
  const bool plural = s.front().text == "ops";
  std::size_t k = 1;
  std::string current;
  while (k < s.size() && s[k].text != ":") {
    if (plural) {
      op.names.push_back(s[k].text);
    } else {
      current += s[k].text;
    }
    ++k;
  }
  if (!plural) op.names.push_back(current);
  if (k >= s.size() || op.names.empty() || op.names.front().empty()) syntax(op.at, "malformed operator declaration");
  ++k;
  while (k < s.size() && s[k].text != "->") op.domain.push_back(readSort(s, k));
  if (k >= s.size()) syntax(op.at, "'->' expected in operator declaration");
  ++k;
  op.range = readSort(s, k);
  if (k < s.size()) {
    if (s[k].text != "[" || s.back().text != "]") syntax(s[k], "attribute list expected");
    op.attrs = parseOpAttributes(s, k + 1, s.size() - 1);
  }
  return op;
}

RawStatement parseStatement(const Tokens& s) {
  RawStatement st;
  st.at = s.front();
  st.isRule = s.front().text == "rl";
  std::size_t k = 1;
  if (s.size() > 4 && s[1].text == "[" && s[3].text == "]" && s[4].text == ":") {
    st.label = s[2].text;
    k = 5;
  }
  std::size_t end = s.size();
  if (s.back().text == "]") {
    std::size_t open = end - 1;
    while (open > k && s[open].text != "[") --open;
    if (s[open].text != "[") syntax(s.back(), "unbalanced attribute list");
    for (std::size_t a = open + 1; a + 1 < end; ++a) {
      const std::string& w = s[a].text;
      if (w == "variant" && !st.isRule) {
        st.flag = true;
      } else if (w == "narrowing" && st.isRule) {
        st.flag = true;
      } else if (w == "label" && a + 2 < end) {
        st.label = s[++a].text;
      } else if (w == "nonexec" || w == "owise" || w == "otherwise") {
        unsupported(s[a], w);
      } else if (w == "metadata") {
        ++a;
      } else {
        unsupported(s[a], "statement attribute " + w);
      }
    }
    end = open;
  }
  const std::string sep = st.isRule ? "=>" : "=";
  int depth = 0;
  std::size_t split = 0;
  for (std::size_t a = k; a < end; ++a) {
    if (s[a].text == "(") ++depth;
    if (s[a].text == ")") --depth;
    if (depth == 0 && s[a].text == sep) {
      split = a;
      break;
    }
  }
  if (split == 0) syntax(st.at, "'" + sep + "' expected");
  st.lhs.assign(s.begin() + static_cast<std::ptrdiff_t>(k), s.begin() + static_cast<std::ptrdiff_t>(split));
  st.rhs.assign(s.begin() + static_cast<std::ptrdiff_t>(split + 1), s.begin() + static_cast<std::ptrdiff_t>(end));
  if (st.lhs.empty() || st.rhs.empty()) syntax(st.at, "empty side in statement");
  return st;
}

SortId resolveSort(const Signature& sig, const std::string& label, const Token& at) {
  auto s = sig.findSort(label);
  if (!s) throw Error(ErrorCode::UnknownSort, where(at) + ": unknown sort " + label);
  return *s;
}

}  // namespace

TheoryPtr parseModule(std::string_view text, bool allowReserved) {
  Tokens toks = tokenize(text);
  if (toks.empty()) throw Error(ErrorCode::SyntaxError, "line 1, col 1: empty module");
  if (toks[0].text != "mod" && toks[0].text != "fmod") syntax(toks[0], "'mod' expected");
  if (toks.size() < 3 || toks[2].text != "is") syntax(toks.size() > 1 ? toks[1] : toks[0], "'is' expected");
  const std::string endWord = toks[0].text == "mod" ? "endm" : "endfm";
  if (toks.back().text != endWord) syntax(toks.back(), "'" + endWord + "' expected");

  auto theory = std::make_shared<Theory>();
  theory->name = toks[1].text;
  theory->sig = std::make_shared<Signature>();
  Signature& sig = *theory->sig;

  std::vector<Tokens> statements;
  Tokens current;
  for (std::size_t k = 3; k + 1 < toks.size(); ++k) {
    if (toks[k].text == ".") {
      if (current.empty()) syntax(toks[k], "empty statement");
      statements.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(toks[k]);
    }
  }
  if (!current.empty()) syntax(current.front(), "statement not terminated by '.'");

  std::vector<std::pair<Tokens, Token>> subsorts;
  std::vector<RawOp> ops;
  std::vector<std::pair<std::vector<std::string>, std::pair<std::string, Token>>> varDecls;
  std::vector<RawStatement> raw;
  for (const auto& s : statements) {
    const std::string& kw = s.front().text;
    if (kw == "sort" || kw == "sorts") {
      for (std::size_t k = 1; k < s.size(); ++k) {
        if (isPunct(s[k].text)) syntax(s[k], "sort name expected");
        sig.addSort(s[k].text);
      }
    } else if (kw == "subsort" || kw == "subsorts") {
      subsorts.emplace_back(Tokens(s.begin() + 1, s.end()), s.front());
    } else if (kw == "op" || kw == "ops") {
      ops.push_back(parseOpDecl(s));
    } else if (kw == "var" || kw == "vars") {
      std::vector<std::string> names;
      std::size_t k = 1;
      while (k < s.size() && s[k].text != ":") names.push_back(s[k++].text);
      if (k + 1 >= s.size() || names.empty()) syntax(s.front(), "malformed variable declaration");
      ++k;
      std::string sortLabel = readSort(s, k);
      varDecls.push_back({names, {sortLabel, s.front()}});
    } else if (kw == "eq" || kw == "rl") {
      raw.push_back(parseStatement(s));
    } else if (kw == "ceq" || kw == "crl" || kw == "cmb" || kw == "mb") {
      unsupported(s.front(), kw == "ceq" || kw == "crl" ? "conditional statements" : "membership axioms");
    } else if (kw == "including" || kw == "protecting" || kw == "extending" || kw == "inc" ||
               kw == "pr" || kw == "ex" || kw == "us" || kw == "using") {
      unsupported(s.front(), "module importation");
    } else {
      syntax(s.front(), "unexpected '" + kw + "'");
    }
  }

  for (const auto& [chain, at] : subsorts) {
    std::vector<std::vector<SortId>> groups(1);
    for (const auto& t : chain) {
      if (t.text == "<") {
        groups.emplace_back();
        continue;
      }
      groups.back().push_back(resolveSort(sig, t.text, t));
    }
    if (groups.size() < 2) syntax(at, "'<' expected in subsort declaration");
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      if (groups[g].empty() || groups[g + 1].empty()) syntax(at, "empty subsort group");
      for (SortId a : groups[g])
        for (SortId b : groups[g + 1]) sig.addSubsort(a, b);
    }
  }
  sig.finalizeSorts();

  for (const auto& op : ops) {
    SortId range = resolveSort(sig, op.range, op.at);
    std::vector<SortId> domain;
    for (const auto& d : op.domain)
      domain.push_back(d == "Universal" && op.attrs.poly ? range : resolveSort(sig, d, op.at));
    for (const auto& name : op.names) {
      if (!allowReserved && (name == "_=?=_" || name == "tt"))
        throw Error(ErrorCode::NameClash, where(op.at) + ": operator " + name + " is reserved");
      sig.addOp(name, domain, range, op.attrs);
    }
  }
  sig.finalizeOps();
  for (std::size_t id = 0; id < sig.numSymbols(); ++id) {
    const Symbol& s = sig.symbol(static_cast<SymbolId>(id));
    const bool oneSided = s.attrs.idKind == IdentityKind::Left || s.attrs.idKind == IdentityKind::Right;
    if (s.attrs.comm && oneSided)
      throw Error(ErrorCode::UnsupportedAxCombination, "unsupported axiom combination on " + s.name);
  }

  for (const auto& [names, sortAt] : varDecls) {
    SortId s = resolveSort(sig, sortAt.first, sortAt.second);
    for (const auto& n : names) {
      auto it = std::find_if(theory->vars.begin(), theory->vars.end(),
                             [&](const VarDecl& v) { return v.name == n; });
      if (it != theory->vars.end()) {
        it->sort = s;
      } else {
        theory->vars.push_back({n, s});
      }
    }
  }

  auto declared = theory->declaredVars();
  TermContext ctx = statementContext(declared);
  std::set<std::string> ruleLabels;
  int ruleIndex = 0;
  for (const auto& st : raw) {
    Term lhs = parseTerm(sig, st.lhs, ctx);
    Term rhs = parseTerm(sig, st.rhs, ctx);
    if (sig.kindOf(lhs->sort()) != sig.kindOf(rhs->sort()))
      throw Error(ErrorCode::SortError, where(st.at) + ": sides of statement have different kinds");
    if (st.isRule) {
      ++ruleIndex;
      Rule r;
      r.label = st.label.empty() ? "rl-" + std::to_string(ruleIndex) : st.label;
      r.generatedLabel = st.label.empty();
      if (!ruleLabels.insert(r.label).second)
        syntax(st.at, "duplicate rule label " + r.label);
      r.lhs = lhs;
      r.rhs = rhs;
      r.narrowing = st.flag;
      theory->rules.push_back(std::move(r));
    } else {
      if (lhs->isVar()) syntax(st.at, "equation left-hand side is a variable");
      VarSet lv = varsOf(lhs);
      for (const auto& v : varsOf(rhs))
        if (!lv.count(v))
          syntax(st.at, "right-hand side variable " + printVar(sig, v) + " does not occur on the left");
      Equation e;
      e.label = st.label;
      e.printLabel = !st.label.empty();
      if (allowReserved && st.label.empty() && lhs->symbolName() == "_=?=_") e.label = "unif";
      if (allowReserved && (st.label == "AU1" || st.label == "AU2" || st.label == "AU3"))
        e.attachedTo = lhs->symbol();
      e.lhs = lhs;
      e.rhs = rhs;
      e.variant = st.flag;
      theory->equations.push_back(std::move(e));
    }
  }
  theory->prepare();
  return theory;
}

namespace {

std::string opAttributes(const Symbol& sym, const OpAttributes& attrs) {
  Symbol s = sym;
  s.attrs = attrs;
  std::vector<std::string> parts;
  if (s.attrs.assoc) parts.emplace_back("assoc");
  if (s.attrs.comm) parts.emplace_back("comm");
  switch (s.attrs.idKind) {
    case IdentityKind::Both: parts.push_back("id: " + s.attrs.identity); break;
    case IdentityKind::Left: parts.push_back("left id: " + s.attrs.identity); break;
    case IdentityKind::Right: parts.push_back("right id: " + s.attrs.identity); break;
    case IdentityKind::None: break;
  }
  if (s.attrs.poly) {
    std::string p = "poly (";
    for (int k = 1; k <= s.arity; ++k) p += (k > 1 ? " " : "") + std::to_string(k);
    parts.push_back(p + ")");
  }
  if (parts.empty()) return "";
  std::string out = " [";
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? " " : "") + parts[k];
  return out + "]";
}

std::string opProfile(const Signature& sig, const Symbol& s, const OpDecl& d, const OpAttributes& attrs) {
  std::string out = " :";
  for (SortId x : d.domain) out += " " + (s.attrs.poly ? std::string("Universal") : sig.sortLabel(x));
  return out + " -> " + sig.sortLabel(d.range) + opAttributes(s, attrs);
}

}  // namespace

std::string printTheory(const Theory& theory) {
  const Signature& sig = theory.signature();
  auto declared = theory.declaredVars();
  TermContext ctx = statementContext(declared);
  std::string out = "mod " + theory.name + " is\n";

  int nSorts = theory.printedSortCount >= 0 ? theory.printedSortCount : sig.numSorts();
  if (nSorts > 0) {
    out += nSorts == 1 ? "  sort" : "  sorts";
    for (SortId s = 0; s < nSorts; ++s) out += " " + sig.sortName(s);
    out += " .\n";
  }
  const auto& subs = sig.subsortDecls();
  for (std::size_t k = 0; k < subs.size();) {
    std::size_t e = k;
    while (e < subs.size() && subs[e].second == subs[k].second) ++e;
    out += e - k == 1 ? "  subsort" : "  subsorts";
    for (std::size_t m = k; m < e; ++m) out += " " + sig.sortName(subs[m].first);
    out += " < " + sig.sortName(subs[k].second) + " .\n";
    k = e;
  }

  auto equationLine = [&](const Equation& e) {
    std::string line = "  eq ";
    if (e.printLabel && !e.label.empty()) line += "[" + e.label + "] : ";
    line += printTerm(sig, e.lhs, ctx) + " = " + printTerm(sig, e.rhs, ctx);
    if (e.variant) line += " [variant]";
    return line + " .\n";
  };
  auto attached = [&](SymbolId id) {
    std::string s;
    for (const auto& e : theory.equations)
      if (e.attachedTo == id && !e.hidden) s += equationLine(e);
    return s;
  };
  auto attrsOf = [&](SymbolId id) {
    auto it = theory.printedAttrs.find(id);
    return it != theory.printedAttrs.end() ? it->second : sig.symbol(id).attrs;
  };

  const int nSym = static_cast<int>(sig.numSymbols());
  for (int id = 0; id < nSym;) {
    const Symbol& s = sig.symbol(id);
    std::string tail = attached(id);
    if (s.decls.size() == 1 && tail.empty()) {
      int e = id + 1;
      while (e < nSym) {
        const Symbol& o = sig.symbol(e);
        if (o.decls.size() != 1 || !(o.decls[0] == s.decls[0]) || !(attrsOf(e) == attrsOf(id)) ||
            !attached(e).empty())
          break;
        ++e;
      }
      if (e - id > 1) {
        out += "  ops";
        for (int m = id; m < e; ++m) out += " " + sig.symbol(m).name;
        out += opProfile(sig, s, s.decls[0], attrsOf(id)) + " .\n";
        id = e;
        continue;
      }
    }
    for (const auto& d : s.decls) out += "  op " + s.name + opProfile(sig, s, d, attrsOf(id)) + " .\n";
    out += tail;
    ++id;
  }

  for (std::size_t k = 0; k < theory.vars.size();) {
    std::size_t e = k;
    while (e < theory.vars.size() && theory.vars[e].sort == theory.vars[k].sort) ++e;
    out += e - k == 1 ? "  var" : "  vars";
    for (std::size_t m = k; m < e; ++m) out += " " + theory.vars[m].name;
    out += " : " + sig.sortLabel(theory.vars[k].sort) + " .\n";
    k = e;
  }
  for (const auto& e : theory.equations)
    if (e.attachedTo < 0 && !e.hidden) out += equationLine(e);
  for (const auto& r : theory.rules) {
    out += "  rl ";
    if (!r.generatedLabel) out += "[" + r.label + "] : ";
    out += printTerm(sig, r.lhs, ctx) + " => " + printTerm(sig, r.rhs, ctx);
    if (r.narrowing) out += " [narrowing]";
    out += " .\n";
  }
  return out + "endm\n";
}

}  // namespace narwhal
