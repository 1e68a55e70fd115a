#include "narwhal/term.hpp"

#include <functional>
#include <sstream>

#include "narwhal/error.hpp"

namespace narwhal {

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

int rankOf(const TermNode& t) {
  if (t.isVar()) return 0;
  return t.arity() == 0 ? 1 : 2;
}

}  // namespace

std::strong_ordering Var::operator<=>(const Var& other) const {
  if (auto c = family <=> other.family; c != 0) return c;
  if (auto c = name <=> other.name; c != 0) return c;
  if (auto c = index <=> other.index; c != 0) return c;
  return sort <=> other.sort;
}

TermNode::TermNode(Private, Var v) : isVar_(true), var_(std::move(v)) {
  sort_ = var_.sort;
  ground_ = false;
  std::size_t h = std::hash<std::string>{}(var_.name);
  h = mix(h, static_cast<std::size_t>(var_.family));
  h = mix(h, static_cast<std::size_t>(var_.index));
  h = mix(h, static_cast<std::size_t>(var_.sort + 1000));
  hash_ = h;
}

TermNode::TermNode(Private, SymbolId symbol, const std::string* name, std::vector<Term> args,
                   SortId sort, bool illSorted)
    : symbol_(symbol), name_(name), args_(std::move(args)), sort_(sort), illSorted_(illSorted) {
  std::size_t h = mix(0x51ed270b27, static_cast<std::size_t>(symbol_));
  for (const auto& a : args_) {
    h = mix(h, a->hash());
    ground_ = ground_ && a->ground();
    illSorted_ = illSorted_ || a->illSorted();
    size_ += a->size();
  }
  hash_ = h;
}

int compareTerms(const Term& a, const Term& b) {
  if (a.get() == b.get()) return 0;
  int ra = rankOf(*a), rb = rankOf(*b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (a->isVar()) {
    auto c = a->var() <=> b->var();
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a->symbol() != b->symbol()) {
    int c = a->symbolName().compare(b->symbolName());
    if (c != 0) return c < 0 ? -1 : 1;
    return a->symbol() < b->symbol() ? -1 : 1;
  }
  const auto& xs = a->args();
  const auto& ys = b->args();
  std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = compareTerms(xs[i], ys[i]);
    if (c != 0) return c;
  }
  if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
  return 0;
}

bool termEqual(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (a->hash() != b->hash()) return false;
  return compareTerms(a, b) == 0;
}

void collectVars(const Term& t, VarSet& out) {
  if (t->isVar()) {
    out.insert(t->var());
    return;
  }
  if (t->ground()) return;
  for (const auto& a : t->args()) collectVars(a, out);
}

VarSet varsOf(const Term& t) {
  VarSet out;
  collectVars(t, out);
  return out;
}

bool occursIn(const Var& v, const Term& t) {
  if (t->isVar()) return t->var() == v;
  if (t->ground()) return false;
  for (const auto& a : t->args())
    if (occursIn(v, a)) return true;
  return false;
}

std::string positionToString(const Position& p) {
  if (p.empty()) return "Λ";
  std::ostringstream out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out << '.';
    out << p[i];
  }
  return out.str();
}

Term subtermAt(const Term& t, const Position& p) {
  Term cur = t;
  for (int idx : p) {
    if (cur->isVar() || idx < 1 || idx > static_cast<int>(cur->arity()))
      throw Error(ErrorCode::InvalidRequest, "invalid position " + positionToString(p));
    cur = cur->args()[idx - 1];
  }
  return cur;
}

namespace {
void positionsRec(const Term& t, Position& cur, std::vector<Position>& out) {
  if (t->isVar()) return;
  out.push_back(cur);
  for (std::size_t i = 0; i < t->arity(); ++i) {
    cur.push_back(static_cast<int>(i) + 1);
    positionsRec(t->args()[i], cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Position> nonVariablePositions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  positionsRec(t, cur, out);
  return out;
}

}  // namespace narwhal
