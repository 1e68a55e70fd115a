#include "narwhal/wire.hpp"

#include <exception>

#include "narwhal/module_language.hpp"

namespace narwhal {

namespace {

constexpr int kSnapshotVersion = 1;
constexpr const char* kSnapshotFormat = "narwhal-session";

const Json& field(const Json& req, const char* name) {
  if (!req.is_object() || !req.contains(name) || req[name].is_null())
    throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + name + "'");
  return req[name];
}

std::string stringField(const Json& req, const char* name) {
  const Json& v = field(req, name);
  if (!v.is_string()) throw Error(ErrorCode::InvalidRequest, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

template <class T>
T numberOr(const Json& obj, const char* name, T fallback) {
  if (!obj.contains(name) || obj[name].is_null()) return fallback;
  if (!obj[name].is_number_integer())
    throw Error(ErrorCode::InvalidRequest, std::string("field '") + name + "' must be an integer");
  auto v = obj[name].get<long long>();
  if (v < 0) throw Error(ErrorCode::InvalidRequest, std::string("field '") + name + "' must not be negative");
  return static_cast<T>(v);
}

Json labels(const std::vector<int>& ids, bool nodes) {
  Json out = Json::array();
  for (int id : ids) out.push_back(nodes ? Session::nodeLabel(id) : Session::edgeLabel(id));
  return out;
}

Json growthJson(const Session& s, const Growth& g) {
  Json nodes = Json::array(), edges = Json::array();
  for (int n : g.nodes) nodes.push_back(wire::node(s, n));
  for (int e : g.edges) edges.push_back(wire::edge(s, e));
  Json j;
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace

CreateRequest parseCreateRequest(const Json& req) {
  CreateRequest r;
  r.module = stringField(req, "module");
  r.mode = parseMode(stringField(req, "mode"));
  r.input = stringField(req, "input");
  if (req.contains("target") && !req["target"].is_null()) r.target = stringField(req, "target");
  if (req.contains("bounds") && !req["bounds"].is_null()) {
    const Json& b = req["bounds"];
    if (!b.is_object()) throw Error(ErrorCode::InvalidRequest, "field 'bounds' must be an object");
    r.bounds.maxDepth = numberOr<int>(b, "maxDepth", r.bounds.maxDepth);
    r.bounds.maxCount = numberOr<std::size_t>(b, "maxCount", r.bounds.maxCount);
    r.bounds.budget = numberOr<std::size_t>(b, "budget", r.bounds.budget);
    r.bounds.assocBound = numberOr<int>(b, "assocBound", r.bounds.assocBound);
  }
  return r;
}

Json boundsJson(const Bounds& b) {
  return {{"maxDepth", b.maxDepth}, {"maxCount", b.maxCount}, {"budget", b.budget}, {"assocBound", b.assocBound}};
}

const std::vector<std::string>& SessionService::endpoints() {
  static const std::vector<std::string> names{
      "create-session", "expand-node",        "expand-subtree",     "fold-node",  "unfold-node",
      "inspect-transition", "inspect-unifier", "instrumented-view", "graph-view", "show-program"};
  return names;
}

Json SessionService::handle(const std::string& endpoint, const Json& request, int* status) {
  try {
    Json out = dispatch(endpoint, request);
    if (status) *status = 200;
    return out;
  } catch (const Error& e) {
    if (status) *status = wire::httpStatus(e.code());
    return wire::error(e.code(), e.what());
  } catch (const std::exception& e) {
    if (status) *status = 500;
    return {{"error", {{"code", "InternalError"}, {"message", e.what()}}}};
  }
}

Json SessionService::dispatch(const std::string& endpoint, const Json& req) {
  if (endpoint == "create-session") return createSession(req);
  if (endpoint == "expand-node") return expandNode(req);
  if (endpoint == "expand-subtree") return expandSubtree(req);
  if (endpoint == "fold-node") return foldNode(req, true);
  if (endpoint == "unfold-node") return foldNode(req, false);
  if (endpoint == "inspect-transition") return inspectTransition(req);
  if (endpoint == "inspect-unifier") return inspectUnifier(req);
  if (endpoint == "instrumented-view") return instrumentedView(req);
  if (endpoint == "graph-view") return graphView(req);
  if (endpoint == "show-program") return showProgram(req);
  throw Error(ErrorCode::InvalidRequest, "unknown endpoint '" + endpoint + "'");
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

std::string SessionService::nextId() {
  std::lock_guard lock(mu_);
  return "session-" + std::to_string(++counter_);
}

void SessionService::record(const std::string& root, Json op) {
  std::lock_guard lock(mu_);
  logs_[root].ops.push_back(std::move(op));
}

std::size_t SessionService::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

Json SessionService::createSession(const Json& req) {
  CreateRequest cr = parseCreateRequest(req);
  const std::string id = nextId();
  auto entry = std::make_shared<Entry>();
  entry->session = std::make_unique<Session>(id, cr);
  entry->root = id;
  const Session& s = *entry->session;

  Json create;
  create["module"] = cr.module;
  create["mode"] = modeName(cr.mode);
  create["input"] = cr.input;
  create["target"] = cr.target ? Json(*cr.target) : Json(nullptr);
  create["bounds"] = boundsJson(cr.bounds);

  Json out;
  out["session"] = id;
  out["mode"] = modeName(s.mode());
  out["root"] = wire::node(s, 0);
  out["target"] = s.target() ? Json(printTerm(s.theory(), *s.target())) : Json(nullptr);
  out["bounds"] = boundsJson(s.bounds());
  out["diagnostics"] = wire::diagnostics(s.report().diagnostics);
  {
    std::lock_guard lock(mu_);
    sessions_[id] = std::move(entry);
    logs_[id].create = std::move(create);
  }
  return out;
}

Json SessionService::expandNode(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::unique_lock lock(entry->mu);
  Session& s = *entry->session;
  const int n = s.resolveNode(stringField(req, "node"));
  Growth g = s.expandNode(n);
  record(entry->root, {{"endpoint", "expand-node"}, {"request", {{"session", s.id()}, {"node", req["node"]}}}});
  Json out;
  out["session"] = s.id();
  out["node"] = wire::node(s, n);
  Json body = growthJson(s, g);
  out["nodes"] = std::move(body["nodes"]);
  out["edges"] = std::move(body["edges"]);
  return out;
}

Json SessionService::expandSubtree(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::unique_lock lock(entry->mu);
  Session& s = *entry->session;
  const int n = s.resolveNode(stringField(req, "node"));
  int depth = 3;
  if (req.contains("depth") && !req["depth"].is_null()) {
    if (!req["depth"].is_number_integer()) throw Error(ErrorCode::InvalidRequest, "field 'depth' must be an integer");
    depth = req["depth"].get<int>();
  }
  Growth g = s.expandSubtree(n, depth);
  record(entry->root, {{"endpoint", "expand-subtree"},
                       {"request", {{"session", s.id()}, {"node", req["node"]}, {"depth", depth}}}});
  Json out;
  out["session"] = s.id();
  out["node"] = Session::nodeLabel(n);
  out["depth"] = depth;
  Json body = growthJson(s, g);
  out["nodes"] = std::move(body["nodes"]);
  out["edges"] = std::move(body["edges"]);
  out["frontier"] = labels(g.frontier, true);
  return out;
}

Json SessionService::foldNode(const Json& req, bool fold) {
  auto entry = find(stringField(req, "session"));
  std::unique_lock lock(entry->mu);
  Session& s = *entry->session;
  const int n = s.resolveNode(stringField(req, "node"));
  fold ? s.fold(n) : s.unfold(n);
  record(entry->root, {{"endpoint", fold ? "fold-node" : "unfold-node"},
                       {"request", {{"session", s.id()}, {"node", req["node"]}}}});
  std::vector<int> visible, hidden;
  for (const auto& node : s.nodes()) (s.visible(node.id) ? visible : hidden).push_back(node.id);
  Json out;
  out["session"] = s.id();
  out["node"] = wire::node(s, n);
  out["visible"] = labels(visible, true);
  out["hidden"] = labels(hidden, true);
  return out;
}

Json SessionService::inspectTransition(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::shared_lock lock(entry->mu);
  const Session& s = *entry->session;
  return wire::transition(s, s.resolveEdge(stringField(req, "edge")));
}

Json SessionService::inspectUnifier(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::shared_lock lock(entry->mu);
  const Session& s = *entry->session;
  const int e = s.resolveEdge(stringField(req, "edge"));
  const SessionEdge& edge = s.edge(e);
  if (edge.kind != EdgeKind::Narrowing)
    throw Error(ErrorCode::InvalidRequest, "edge " + Session::edgeLabel(e) + " is not a narrowing step");
  const std::string id = nextId();
  auto child = std::make_shared<Entry>();
  child->session = Session::forUnifier(id, s, edge);
  child->root = entry->root;
  const Session& c = *child->session;

  Json out;
  out["session"] = s.id();
  out["edge"] = Session::edgeLabel(e);
  out["child"] = id;
  out["mode"] = modeName(c.mode());
  Json nodes = Json::array(), edges = Json::array(), hn = Json::array(), he = Json::array();
  for (const auto& n : c.nodes()) {
    nodes.push_back(wire::node(c, n.id));
    if (n.highlighted) hn.push_back(Session::nodeLabel(n.id));
  }
  for (const auto& ed : c.edges()) {
    edges.push_back(wire::edge(c, ed.id));
    if (ed.highlighted) he.push_back(Session::edgeLabel(ed.id));
  }
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  out["highlighted"] = {{"nodes", hn}, {"edges", he}, {"leaf", hn.empty() ? Json(nullptr) : hn.back()}};
  const NarrowingStep& st = *edge.narrowing;
  out["unifier"] = wire::substitution(s.theory(), st.unifier);
  // rule variables under their declared names
  Substitution declared;
  for (const auto& [v, t] : *c.highlightedUnifier()) {
    Var key = v;
    for (const auto& [orig, fresh] : st.renaming)
      if (fresh->var() == v) key = orig;
    declared.bind(key, t);
  }
  out["composed"] = wire::substitution(s.theory(), declared);
  {
    std::lock_guard g(mu_);
    sessions_[id] = std::move(child);
  }
  record(entry->root,
         {{"endpoint", "inspect-unifier"}, {"request", {{"session", s.id()}, {"edge", req["edge"]}}}, {"child", id}});
  return out;
}

Json SessionService::instrumentedView(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::shared_lock lock(entry->mu);
  const Session& s = *entry->session;
  const int e = s.resolveEdge(stringField(req, "edge"));
  Json out;
  out["session"] = s.id();
  out["edge"] = Session::edgeLabel(e);
  Json t = wire::trace(s.theory(), s.instrumented(e));
  for (auto& [k, v] : t.items()) out[k] = v;
  return out;
}

Json SessionService::graphView(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::shared_lock lock(entry->mu);
  return wire::graph(*entry->session);
}

Json SessionService::showProgram(const Json& req) {
  auto entry = find(stringField(req, "session"));
  std::shared_lock lock(entry->mu);
  return wire::program(*entry->session);
}

Json SessionService::snapshot(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(mu_);
  const Log& log = logs_.at(entry->root);
  Json out;
  out["format"] = kSnapshotFormat;
  out["version"] = kSnapshotVersion;
  out["session"] = entry->root;
  out["create"] = log.create;
  out["operations"] = log.ops;
  return out;
}

std::string SessionService::restore(const Json& snap, std::vector<Json>* transcript) {
  if (!snap.is_object() || snap.value("format", "") != kSnapshotFormat)
    throw Error(ErrorCode::InvalidRequest, "not a session snapshot");
  if (snap.value("version", 0) != kSnapshotVersion)
    throw Error(ErrorCode::InvalidRequest, "unsupported snapshot version " + snap.value("version", Json(0)).dump());
  std::map<std::string, std::string> ids;
  Json created = createSession(field(snap, "create"));
  const std::string root = created["session"];
  if (transcript) transcript->push_back(std::move(created));
  ids[stringField(snap, "session")] = root;
  for (const auto& op : field(snap, "operations")) {
    Json req = field(op, "request");
    auto it = ids.find(stringField(req, "session"));
    if (it == ids.end()) throw Error(ErrorCode::InvalidRequest, "snapshot refers to an unknown session");
    req["session"] = it->second;
    Json resp = dispatch(stringField(op, "endpoint"), req);
    if (op.contains("child")) ids[stringField(op, "child")] = resp["child"];
    if (transcript) transcript->push_back(std::move(resp));
  }
  return root;
}

}  // namespace narwhal
