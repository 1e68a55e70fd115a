#include "narwhal/session.hpp"

#include <deque>

#include "narwhal/error.hpp"
#include "narwhal/module_language.hpp"

namespace narwhal {

const char* modeName(Mode m) {
  switch (m) {
    case Mode::Rewriting: return "rewriting";
    case Mode::FvNarrowing: return "fv-narrowing";
    case Mode::EquationalUnification: return "equational-unification";
    case Mode::ReNarrowing: return "re-narrowing";
  }
  return "?";
}

Mode parseMode(const std::string& name) {
  for (Mode m : {Mode::Rewriting, Mode::FvNarrowing, Mode::EquationalUnification, Mode::ReNarrowing})
    if (name == modeName(m)) return m;
  throw Error(ErrorCode::InvalidRequest, "unknown mode '" + name + "'");
}

const char* statusName(NodeStatus s) {
  switch (s) {
    case NodeStatus::Unexpanded: return "unexpanded";
    case NodeStatus::Expanded: return "expanded";
    case NodeStatus::Folded: return "folded";
    case NodeStatus::Solution: return "solution";
  }
  return "?";
}

const char* edgeKindName(EdgeKind k) {
  switch (k) {
    case EdgeKind::Narrowing: return "narrowing";
    case EdgeKind::Rewrite: return "rewrite";
    case EdgeKind::Variant: return "variant";
  }
  return "?";
}

VariantOptions Bounds::variantOptions() const {
  VariantOptions o;
  o.maxDepth = maxDepth;
  o.maxCount = maxCount;
  o.budget = budget;
  o.unify.assocBound = assocBound;
  return o;
}

namespace {

Term rawOf(const NormalForm& nf) { return nf.trace.empty() ? nf.term : nf.trace.front().source; }

}  // namespace

Session::Session(std::string id, const CreateRequest& req)
    : id_(std::move(id)), mode_(req.mode), bounds_(req.bounds) {
  if (bounds_.maxDepth < 0 || bounds_.budget == 0 || bounds_.assocBound < 1)
    throw Error(ErrorCode::InvalidRequest, "bounds out of range");
  original_ = parseModule(req.module);
  Transformed tr = transformTheory(*original_);
  theory_ = tr.theory;
  report_ = tr.report;
  for (const auto& d : report_.diagnostics)
    if (d.level == Diagnostic::Level::Error) throw Error(ErrorCode::UnsupportedFeature, d.message);

  input_ = parseTerm(*theory_, req.input);
  if (req.target) {
    if (mode_ != Mode::ReNarrowing && mode_ != Mode::Rewriting)
      throw Error(ErrorCode::InvalidRequest, std::string("a target term is not allowed in ") + modeName(mode_) +
                                                 " mode");
    target_ = parseTerm(*theory_, *req.target);
    if (theory_->signature().kindOf(target_.value()->sort()) != theory_->signature().kindOf(input_->sort()))
      throw Error(ErrorCode::SortError, "input and target terms have different kinds");
  }
  if (mode_ == Mode::EquationalUnification &&
      (input_->isVar() || input_->symbol() != theory_->unificationSymbol()))
    throw Error(ErrorCode::InvalidRequest, "equational-unification mode expects a term of the form t1 =?= t2");

  rootVars_ = varsOf(input_);
  goalVars_ = rootVars_;
  std::vector<Term> seen{input_};
  if (target_) {
    collectVars(*target_, goalVars_);
    seen.push_back(*target_);
  }
  gen_ = VarGen(freshStartAbove(seen));
  addNode(normalForm(*theory_, input_, bounds_.budget), -1, -1, {});
  checkGoal(0);
}

std::unique_ptr<Session> Session::forUnifier(std::string id, const Session& parent, const SessionEdge& edge) {
  if (!edge.narrowing || !edge.narrowing->unifierTree)
    throw Error(ErrorCode::InvalidRequest, "edge " + edgeLabel(edge.id) + " is not a narrowing step");
  const NarrowingStep& step = *edge.narrowing;
  const FVTree& tree = *step.unifierTree;
  std::unique_ptr<Session> s(new Session());
  s->id_ = std::move(id);
  s->mode_ = Mode::EquationalUnification;
  s->bounds_ = parent.bounds_;
  s->original_ = parent.original_;
  s->theory_ = parent.theory_;
  s->report_ = parent.report_;
  s->input_ = tree.root;
  s->rootVars_ = tree.rootVars;
  s->goalVars_ = tree.rootVars;
  s->gen_ = VarGen(parent.gensym());

  const std::vector<int> branch = tree.branchTo(step.witness);
  s->addNode(tree.nodes[0].variant.term, -1, -1, tree.nodes[0].variant.subst);
  s->checkGoal(0);
  s->nodes_[0].highlighted = true;
  int current = 0;
  for (std::size_t i = 0; i + 1 < branch.size(); ++i) {
    const FVNode& b = tree.nodes[branch[i]];
    int next = -1;
    for (int c : b.children) {
      const FVNode& child = tree.nodes[c];
      SessionEdge e;
      e.id = static_cast<int>(s->edges_.size());
      e.from = current;
      e.kind = EdgeKind::Variant;
      e.label = child.label;
      e.position = child.position;
      e.raw = child.raw;
      e.variant = FVStep{child.variant, child.label, child.position, child.unifier, child.raw};
      const int nid = s->addNode(child.variant.term, current, e.id, child.variant.subst);
      e.to = nid;
      s->nodes_[current].outEdges.push_back(e.id);
      if (c == branch[i + 1]) {
        e.highlighted = true;
        s->nodes_[nid].highlighted = true;
        next = nid;
      }
      s->edges_.push_back(std::move(e));
      s->checkGoal(nid);
    }
    s->nodes_[current].expanded = true;
    current = next;
  }
  s->highlightedUnifier_ = composeBranch(*s->theory_, tree, step.witness);
  return s;
}

int Session::addNode(Term term, int parent, int inEdge, Substitution path) {
  SessionNode n;
  n.id = static_cast<int>(nodes_.size());
  n.term = std::move(term);
  n.parent = parent;
  n.inEdge = inEdge;
  n.depth = parent < 0 ? 0 : nodes_[parent].depth + 1;
  n.path = std::move(path);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

void Session::checkGoal(int id) {
  SessionNode& n = nodes_[id];
  if (mode_ == Mode::FvNarrowing || mode_ == Mode::EquationalUnification) {
    auto tt = theory_->successSymbol();
    n.solution = tt && !n.term->isVar() && n.term->symbol() == *tt;
    return;
  }
  if (!target_) return;
  n.goal = narwhal::checkGoal(*theory_, *target_, goalVars_, n.term, n.path, gen_, bounds_.variantOptions());
  n.solution = n.goal.has_value();
}

int Session::resolveNode(const std::string& ref) const {
  if (ref.size() > 1 && ref[0] == 's' && ref.find_first_not_of("0123456789", 1) == std::string::npos) {
    long k = std::stol(ref.substr(1));
    if (k >= 1 && k <= static_cast<long>(nodes_.size())) return static_cast<int>(k - 1);
  }
  throw Error(ErrorCode::UnknownNode, "no node '" + ref + "' in session " + id_);
}

int Session::resolveEdge(const std::string& ref) const {
  if (ref.size() > 1 && ref[0] == 'e' && ref.find_first_not_of("0123456789", 1) == std::string::npos) {
    long k = std::stol(ref.substr(1));
    if (k >= 1 && k <= static_cast<long>(edges_.size())) return static_cast<int>(k - 1);
  }
  auto arrow = ref.find("->");
  if (arrow != std::string::npos) {
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    try {
      int from = resolveNode(trim(ref.substr(0, arrow)));
      int to = resolveNode(trim(ref.substr(arrow + 2)));
      if (nodes_[to].parent == from) return nodes_[to].inEdge;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::UnknownEdge, "no edge '" + ref + "' in session " + id_);
}

NodeStatus Session::status(int id) const {
  const SessionNode& n = nodes_.at(id);
  if (n.solution) return NodeStatus::Solution;
  if (n.folded) return NodeStatus::Folded;
  return n.expanded ? NodeStatus::Expanded : NodeStatus::Unexpanded;
}

bool Session::visible(int id) const {
  for (int p = nodes_.at(id).parent; p >= 0; p = nodes_[p].parent)
    if (nodes_[p].folded) return false;
  return true;
}

Growth Session::expandNode(int id) {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw Error(ErrorCode::UnknownNode, "no node " + std::to_string(id));
  if (nodes_[id].expanded) throw Error(ErrorCode::AlreadyExpanded, nodeLabel(id) + " is already expanded");
  Growth g;
  const Term t = nodes_[id].term;
  const VariantOptions vopts = bounds_.variantOptions();
  auto attach = [&](SessionEdge e, Term term, Substitution path) {
    e.id = static_cast<int>(edges_.size());
    e.from = id;
    e.to = addNode(std::move(term), id, e.id, std::move(path));
    nodes_[id].outEdges.push_back(e.id);
    g.nodes.push_back(e.to);
    g.edges.push_back(e.id);
    edges_.push_back(std::move(e));
    checkGoal(g.nodes.back());
  };

  switch (mode_) {
    case Mode::ReNarrowing: {
      NarrowingOptions nopts;
      nopts.variant = vopts;
      auto steps = reNarrowChildren(*theory_, t, nodes_[id].path, rootVars_, gen_, nopts);
      for (auto& st : steps) {
        SessionEdge e;
        e.kind = EdgeKind::Narrowing;
        e.label = st.ruleLabel;
        e.position = st.position;
        e.raw = rawOf(st.normalization);
        Term term = st.term;
        Substitution path = st.computed;
        e.narrowing = std::move(st);
        attach(std::move(e), term, path);
      }
      break;
    }
    case Mode::Rewriting: {
      for (auto& st : oneStepRewrites(*theory_, t, vopts)) {
        SessionEdge e;
        e.kind = EdgeKind::Rewrite;
        e.label = st.ruleLabel;
        e.position = st.position;
        e.raw = rawOf(st.normalization);
        Term term = st.term;
        e.rewrite = std::move(st);
        attach(std::move(e), term, {});
      }
      break;
    }
    case Mode::FvNarrowing:
    case Mode::EquationalUnification: {
      Variant v{t, nodes_[id].path, nodes_[id].depth};
      for (auto& st : fvNarrowStep(*theory_, v, rootVars_, gen_, vopts)) {
        SessionEdge e;
        e.kind = EdgeKind::Variant;
        e.label = st.label;
        e.position = st.position;
        e.raw = st.raw;
        Term term = st.child.term;
        Substitution path = st.child.subst;
        e.variant = std::move(st);
        attach(std::move(e), term, path);
      }
      break;
    }
  }
  nodes_[id].expanded = true;
  return g;
}

Growth Session::expandSubtree(int id, int depth) {
  if (depth < 1 || depth > 5)
    throw Error(ErrorCode::DepthOutOfRange, "subtree depth must be between 1 and 5, got " + std::to_string(depth));
  resolveNode(nodeLabel(id));
  Growth g;
  std::deque<std::pair<int, int>> queue{{id, 0}};
  while (!queue.empty()) {
    auto [n, d] = queue.front();
    queue.pop_front();
    if (d == depth) {
      if (!nodes_[n].expanded) g.frontier.push_back(n);
      continue;
    }
    if (!nodes_[n].expanded) {
      Growth step = expandNode(n);
      g.nodes.insert(g.nodes.end(), step.nodes.begin(), step.nodes.end());
      g.edges.insert(g.edges.end(), step.edges.begin(), step.edges.end());
    }
    for (int e : nodes_[n].outEdges) queue.emplace_back(edges_[e].to, d + 1);
  }
  return g;
}

void Session::fold(int id) {
  SessionNode& n = nodes_.at(id);
  if (n.outEdges.empty()) return;  // nothing to hide
  n.folded = true;
}

void Session::unfold(int id) { nodes_.at(id).folded = false; }

NormalForm Session::instrumented(int id) const {
  const SessionEdge& e = edges_.at(id);
  if (e.narrowing) return e.narrowing->normalization;
  if (e.rewrite) return e.rewrite->normalization;
  NormalizeOptions opts;
  opts.budget = bounds_.budget;
  return normalize(*theory_, e.raw, opts);
}

}  // namespace narwhal
