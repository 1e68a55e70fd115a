#include "narwhal/wire.hpp"

#include <map>

#include "narwhal/module_language.hpp"

namespace narwhal::wire {

namespace {

Json termOrNull(const Theory& th, const Term& t) { return t ? Json(printTerm(th, t)) : Json(nullptr); }

Json ruleJson(const Theory& th, const std::string& label, const Term& lhs, const Term& rhs) {
  Json r;
  r["label"] = label;
  r["lhs"] = termOrNull(th, lhs);
  r["rhs"] = termOrNull(th, rhs);
  r["text"] = lhs ? Json("rl [" + label + "] : " + printTerm(th, lhs) + " => " + printTerm(th, rhs) + " .")
                  : Json(nullptr);
  return r;
}

Json label(int id, bool node) {
  if (id < 0) return nullptr;
  return node ? Session::nodeLabel(id) : Session::edgeLabel(id);
}

}  // namespace

Json substitution(const Theory& theory, const Substitution& s) {
  const Signature& sig = theory.signature();
  Json out;
  Json bindings = Json::array();
  std::string text = "{";
  for (const auto& [v, t] : s) {
    const std::string name = printVar(sig, v);
    const std::string value = printTerm(theory, t);
    if (text.size() > 1) text += ", ";
    text += name + " / " + value;
    bindings.push_back({{"var", name}, {"term", value}});
  }
  out["text"] = text + "}";
  out["bindings"] = std::move(bindings);
  return out;
}

Json node(const Session& s, int id) {
  const SessionNode& n = s.node(id);
  const Theory& th = s.theory();
  Json j;
  j["id"] = Session::nodeLabel(id);
  j["term"] = printTerm(th, n.term);
  j["parent"] = label(n.parent, true);
  j["edge"] = label(n.inEdge, false);
  j["depth"] = n.depth;
  j["status"] = statusName(s.status(id));
  j["expanded"] = n.expanded;
  j["folded"] = n.folded;
  j["solution"] = n.solution;
  j["visible"] = s.visible(id);
  j["highlighted"] = n.highlighted;
  j["substitution"] = substitution(th, n.path);
  j["answer"] = n.goal ? substitution(th, n.goal->answer) : Json(nullptr);
  return j;
}

Json edge(const Session& s, int id) {
  const SessionEdge& e = s.edge(id);
  Json j;
  j["id"] = Session::edgeLabel(id);
  j["from"] = Session::nodeLabel(e.from);
  j["to"] = Session::nodeLabel(e.to);
  j["kind"] = edgeKindName(e.kind);
  j["label"] = e.label;
  j["position"] = positionToString(e.position);
  j["normalized"] = !termEqual(e.raw, s.node(e.to).term);
  j["complete"] = e.narrowing ? e.narrowing->complete : true;
  j["highlighted"] = e.highlighted;
  return j;
}

Json transition(const Session& s, int id) {
  const SessionEdge& e = s.edge(id);
  const Theory& th = s.theory();
  const SessionNode& target = s.node(e.to);
  Json j;
  j["session"] = s.id();
  j["edge"] = Session::edgeLabel(id);
  j["kind"] = edgeKindName(e.kind);
  j["from"] = Session::nodeLabel(e.from);
  j["to"] = Session::nodeLabel(e.to);
  j["term"] = printTerm(th, target.term);
  Json sub = nullptr, input = nullptr, computed = nullptr;
  if (e.narrowing) {
    const NarrowingStep& st = *e.narrowing;
    j["rule"] = ruleJson(th, st.ruleLabel, st.ruleLhs, st.ruleRhs);
    sub = substitution(th, st.ruleSubstitution);
    input = substitution(th, st.inputSubstitution);
    computed = substitution(th, st.computed);
  } else if (e.rewrite) {
    j["rule"] = ruleJson(th, e.rewrite->ruleLabel, e.rewrite->lhs, e.rewrite->rhs);
    sub = substitution(th, e.rewrite->matcher);
  } else {
    const FVStep& st = *e.variant;
    j["rule"] = ruleJson(th, st.label, nullptr, nullptr);
    sub = substitution(th, st.unifier);
    Substitution in;
    const VarSet sourceVars = varsOf(s.node(e.from).term);
    for (const auto& [v, t] : st.unifier)
      if (sourceVars.count(v)) in.bind(v, t);
    input = substitution(th, in);
    computed = substitution(th, st.child.subst);
  }
  j["position"] = positionToString(e.position);
  j["ruleSubstitution"] = std::move(sub);
  j["inputSubstitution"] = std::move(input);
  j["computedSubstitution"] = std::move(computed);
  if (target.goal) {
    j["targetUnifier"] = substitution(th, target.goal->targetUnifiers.front());
    Json all = Json::array();
    for (const auto& u : target.goal->targetUnifiers) all.push_back(substitution(th, u));
    j["targetUnifiers"] = std::move(all);
    j["answer"] = substitution(th, target.goal->answer);
  } else {
    j["targetUnifier"] = nullptr;
    j["targetUnifiers"] = nullptr;
    j["answer"] = nullptr;
  }
  j["complete"] = e.narrowing ? e.narrowing->complete : true;
  return j;
}

Json reductionStep(const Theory& theory, const ReductionStep& step, int index) {
  Json j;
  j["index"] = index;
  j["source"] = printTerm(theory, step.source);
  j["equation"] = step.label;
  j["position"] = positionToString(step.position);
  j["matcher"] = substitution(theory, step.matcher);
  j["lhs"] = printTerm(theory, step.lhs);
  j["rhs"] = printTerm(theory, step.rhs);
  j["result"] = printTerm(theory, step.result);
  return j;
}

Json trace(const Theory& theory, const NormalForm& nf) {
  Json j;
  j["source"] = printTerm(theory, nf.trace.empty() ? nf.term : nf.trace.front().source);
  Json steps = Json::array();
  for (std::size_t i = 0; i < nf.trace.size(); ++i)
    steps.push_back(reductionStep(theory, nf.trace[i], static_cast<int>(i + 1)));
  j["steps"] = std::move(steps);
  j["result"] = printTerm(theory, nf.term);
  return j;
}

Json narrowingStep(const Theory& theory, const NarrowingStep& st) {
  Json j;
  j["rule"] = ruleJson(theory, st.ruleLabel, st.ruleLhs, st.ruleRhs);
  j["position"] = positionToString(st.position);
  j["term"] = printTerm(theory, st.term);
  j["ruleSubstitution"] = substitution(theory, st.ruleSubstitution);
  j["inputSubstitution"] = substitution(theory, st.inputSubstitution);
  j["computedSubstitution"] = substitution(theory, st.computed);
  j["complete"] = st.complete;
  return j;
}

Json graph(const Session& s) {
  const Signature& sig = s.theory().signature();
  std::map<std::string, int> groupOf;
  std::vector<int> group(s.nodes().size(), -1);
  Json nodes = Json::array();
  for (const auto& n : s.nodes()) {
    if (!s.visible(n.id)) continue;
    std::string key = canonicalStateKey(sig, n.term);
    auto [it, fresh] = groupOf.emplace(key, static_cast<int>(nodes.size()));
    group[n.id] = it->second;
    if (fresh) {
      Json g;
      g["id"] = "g" + std::to_string(nodes.size() + 1);
      g["representative"] = Session::nodeLabel(n.id);
      g["term"] = printTerm(s.theory(), n.term);
      g["members"] = Json::array();
      g["solution"] = false;
      nodes.push_back(std::move(g));
    }
    Json& g = nodes[it->second];
    g["members"].push_back(Session::nodeLabel(n.id));
    if (n.solution) g["solution"] = true;
  }
  Json edges = Json::array();
  for (const auto& e : s.edges()) {
    if (group[e.from] < 0 || group[e.to] < 0) continue;
    Json j;
    j["id"] = Session::edgeLabel(e.id);
    j["from"] = nodes[group[e.from]]["id"];
    j["to"] = nodes[group[e.to]]["id"];
    j["label"] = e.label;
    edges.push_back(std::move(j));
  }
  Json out;
  out["session"] = s.id();
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out;
}

Json diagnostics(const std::vector<Diagnostic>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) {
    const char* level = d.level == Diagnostic::Level::Info      ? "info"
                        : d.level == Diagnostic::Level::Warning ? "warning"
                                                                : "error";
    out.push_back({{"level", level}, {"code", d.code}, {"message", d.message}});
  }
  return out;
}

Json program(const Session& s) {
  Json j;
  j["session"] = s.id();
  j["program"] = printTheory(s.theory());
  j["addedOps"] = s.report().addedOps;
  j["addedEquations"] = s.report().addedEquations;
  j["replacedOps"] = s.report().replacedOps;
  j["diagnostics"] = diagnostics(s.report().diagnostics);
  return j;
}

Json error(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", errorCodeName(code)}, {"message", message}}}};
}

int httpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownEdge:
      return 404;
    case ErrorCode::AlreadyExpanded:
      return 409;
    case ErrorCode::UnsupportedFeature:
    case ErrorCode::UnsupportedAxCombination:
    case ErrorCode::ReductionBudgetExceeded:
      return 422;
    default:
      return 400;
  }
}

}  // namespace narwhal::wire
