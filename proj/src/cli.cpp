#include "narwhal/cli.hpp"

#include <csignal>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "narwhal/module_language.hpp"
#include "narwhal/narrowing.hpp"
#include "narwhal/server.hpp"
#include "narwhal/transform.hpp"
#include "narwhal/variant.hpp"
#include "narwhal/wire.hpp"

namespace narwhal {

namespace {

struct Globals {
  std::string format = "text";
  int assocBound = 4;
  int maxDepth = -1;  // per subcommand default when unset
  std::size_t maxCount = 512;
  std::size_t maxSolutions = 1;
  std::size_t budget = 10000;

  bool structured() const { return format == "structured"; }
  VariantOptions variant(bool searchDepth) const {
    VariantOptions o;
    if (!searchDepth && maxDepth >= 0) o.maxDepth = maxDepth;
    o.maxCount = maxCount;
    o.budget = budget;
    o.unify.assocBound = assocBound;
    return o;
  }
  Bounds bounds() const {
    Bounds b;
    b.maxCount = maxCount;
    b.budget = budget;
    b.assocBound = assocBound;
    return b;
  }
};

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidRequest, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  TheoryPtr original;
  Transformed transformed;
  const Theory& theory() const { return *transformed.theory; }
};

Loaded load(const std::string& path) {
  Loaded l;
  l.original = parseModule(readFile(path));
  l.transformed = transformTheory(*l.original);
  return l;
}

void printSubstText(std::ostream& out, const Theory& th, const Substitution& s, const std::string& indent) {
  if (s.empty()) {
    out << indent << "(empty substitution)\n";
    return;
  }
  for (const auto& [v, t] : s) out << indent << printVar(th.signature(), v) << " --> " << printTerm(th, t) << "\n";
}

Json unifierList(const Theory& th, const std::vector<Substitution>& us) {
  Json arr = Json::array();
  for (const auto& u : us) arr.push_back(wire::substitution(th, u));
  return arr;
}

int cmdReduce(const Globals& g, const std::string& path, const std::string& text, bool withTrace, std::ostream& out) {
  Loaded l = load(path);
  const Theory& th = l.theory();
  Term t = parseTerm(th, text);
  NormalizeOptions opts;
  opts.budget = g.budget;
  NormalForm nf = normalize(th, t, opts);
  if (g.structured()) {
    Json j;
    j["command"] = "reduce";
    j["input"] = printTerm(th, t);
    Json tr = wire::trace(th, nf);
    j["result"] = tr["result"];
    j["sort"] = th.signature().sortLabel(nf.term->sort());
    j["steps"] = withTrace ? tr["steps"] : Json::array();
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "reduce in " << l.original->name << " : " << printTerm(th, t) << " .\n";
  if (withTrace)
    for (std::size_t i = 0; i < nf.trace.size(); ++i) {
      const auto& st = nf.trace[i];
      out << i + 1 << ". [" << st.label << "] at " << positionToString(st.position) << " : "
          << printTerm(th, st.source) << " ---> " << printTerm(th, st.result) << "\n";
    }
  out << "result " << th.signature().sortLabel(nf.term->sort()) << ": " << printTerm(th, nf.term) << "\n";
  return 0;
}

int cmdUnifyAx(const Globals& g, const std::string& path, const std::string& a, const std::string& b,
               std::ostream& out) {
  Loaded l = load(path);
  const Theory& th = l.theory();
  Term t1 = parseTerm(th, a), t2 = parseTerm(th, b);
  VarGen gen(freshStartAbove({t1, t2}));
  UnifyOptions opts;
  opts.assocBound = g.assocBound;
  SolutionSet us = unifyModAx(th.signature(), t1, t2, gen, opts);
  if (g.structured()) {
    Json j;
    j["command"] = "unify-ax";
    j["unifiers"] = unifierList(th, us.solutions);
    j["complete"] = !us.truncated;
    out << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < us.solutions.size(); ++i) {
    out << "Unifier " << i + 1 << "\n";
    printSubstText(out, th, us.solutions[i], "  ");
  }
  if (us.solutions.empty()) out << "No unifier.\n";
  if (us.truncated) out << "Warning: associative bound reached, the unifier set may be incomplete.\n";
  return 0;
}

int cmdVariantUnify(const Globals& g, const std::string& path, const std::string& a, const std::string& b,
                    std::ostream& out) {
  Loaded l = load(path);
  const Theory& th = l.theory();
  Term t1 = parseTerm(th, a), t2 = parseTerm(th, b);
  VarGen gen(freshStartAbove({t1, t2}));
  VariantUnifiers vu = variantUnifyTerms(th, t1, t2, gen, g.variant(false));
  if (g.structured()) {
    Json j;
    j["command"] = "variant-unify";
    j["unifiers"] = unifierList(th, vu.unifiers);
    j["complete"] = vu.complete;
    j["treeSize"] = vu.tree.nodes.size();
    out << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < vu.unifiers.size(); ++i) {
    out << "Unifier " << i + 1 << "\n";
    printSubstText(out, th, vu.unifiers[i], "  ");
  }
  if (vu.unifiers.empty()) out << "No unifier.\n";
  out << (vu.complete ? "complete" : "incomplete") << "\n";
  return 0;
}

int cmdTransform(const Globals& g, const std::string& path, std::ostream& out, std::ostream& err) {
  Loaded l = load(path);
  const auto& report = l.transformed.report;
  if (g.structured()) {
    Json j;
    j["command"] = "transform";
    j["program"] = printTheory(l.theory());
    j["addedOps"] = report.addedOps;
    j["addedEquations"] = report.addedEquations;
    j["replacedOps"] = report.replacedOps;
    j["diagnostics"] = wire::diagnostics(report.diagnostics);
    out << j.dump(2) << "\n";
    return 0;
  }
  out << printTheory(l.theory());
  for (const auto& d : report.diagnostics) err << d.code << ": " << d.message << "\n";
  return 0;
}

int cmdSearch(const Globals& g, const std::string& path, const std::string& text, std::string goal,
              std::ostream& out) {
  auto first = goal.find_first_not_of(' ');
  if (first == std::string::npos || goal.compare(first, 3, "=>*") != 0)
    throw Error(ErrorCode::InvalidRequest, "the goal must have the form '=>* <term>'");
  goal = goal.substr(first + 3);
  Loaded l = load(path);
  const Theory& th = l.theory();
  Term t = parseTerm(th, text), target = parseTerm(th, goal);
  NarrowingOptions opts;
  opts.variant = g.variant(true);
  opts.maxDepth = g.maxDepth >= 0 ? g.maxDepth : 10;
  opts.maxSolutions = g.maxSolutions;
  ReachabilityResult r = solveReachability(th, t, target, opts);
  const bool exhausted = r.solutions.size() < opts.maxSolutions;
  if (g.structured()) {
    Json j;
    j["command"] = "search";
    Json sols = Json::array();
    for (const auto& s : r.solutions) {
      Json sj;
      sj["depth"] = s.depth;
      sj["state"] = printTerm(th, s.state);
      sj["answer"] = wire::substitution(th, s.answer);
      sj["targetUnifiers"] = unifierList(th, s.targetUnifiers);
      Json path = Json::array();
      for (const auto& st : s.steps) path.push_back(wire::narrowingStep(th, st));
      sj["path"] = std::move(path);
      sols.push_back(std::move(sj));
    }
    j["solutions"] = std::move(sols);
    j["exhausted"] = exhausted;
    j["nodes"] = r.nodes;
    out << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < r.solutions.size(); ++i) {
    const auto& s = r.solutions[i];
    out << "Solution " << i + 1 << " (depth " << s.depth << ")\n";
    out << "  state: " << printTerm(th, s.state) << "\n";
    out << "  answer:\n";
    printSubstText(out, th, s.answer, "    ");
  }
  if (exhausted) out << (r.solutions.empty() ? "No solution within bounds.\n" : "No more solutions within bounds.\n");
  return 0;
}

void printTree(const Session& s, int n, int indent, std::ostream& out) {
  const SessionNode& node = s.node(n);
  out << std::string(indent * 2, ' ');
  if (node.inEdge >= 0) {
    const SessionEdge& e = s.edge(node.inEdge);
    out << "[" << e.label << " @ " << positionToString(e.position) << "] ";
  }
  out << Session::nodeLabel(n) << " " << printTerm(s.theory(), node.term);
  if (node.solution) out << "  (solution)";
  out << "\n";
  for (int e : node.outEdges) printTree(s, s.edge(e).to, indent + 1, out);
}

Json treeJson(const Session& s) {
  Json j;
  j["session"] = s.id();
  Json nodes = Json::array(), edges = Json::array();
  for (const auto& n : s.nodes()) nodes.push_back(wire::node(s, n.id));
  for (const auto& e : s.edges()) edges.push_back(wire::edge(s, e.id));
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

int cmdNarrowTree(const Globals& g, const std::string& path, const std::string& text,
                  const std::optional<std::string>& target, int depth, std::ostream& out) {
  if (depth < 0) throw Error(ErrorCode::DepthOutOfRange, "depth must not be negative");
  CreateRequest cr;
  cr.module = readFile(path);
  cr.mode = Mode::ReNarrowing;
  cr.input = text;
  cr.target = target;
  cr.bounds = g.bounds();
  if (g.maxDepth >= 0) cr.bounds.maxDepth = g.maxDepth;
  Session s("tree", cr);
  std::vector<int> level{0};
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    for (int n : level)
      for (int c : s.expandNode(n).nodes) next.push_back(c);
    level = std::move(next);
  }
  if (g.structured()) {
    Json j = treeJson(s);
    j["command"] = "narrow-tree";
    j["depth"] = depth;
    out << j.dump(2) << "\n";
    return 0;
  }
  printTree(s, 0, 0, out);
  out << s.nodes().size() << " nodes\n";
  return 0;
}

HttpServer* activeServer = nullptr;

int cmdServe(int port, const std::string& host, const std::string& snapshotDir,
             const std::vector<std::string>& resume, std::ostream& out, std::ostream& err) {
  SessionService service;
  for (const auto& file : resume) {
    std::string id = service.restore(Json::parse(readFile(file)));
    out << "restored " << file << " as " << id << "\n";
  }
  HttpServer server(service, snapshotDir);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    err << "error: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  out << "narwhal listening on http://" << host << ":" << bound << "\n" << std::flush;
  activeServer = &server;
  std::signal(SIGINT, [](int) {
    if (activeServer) activeServer->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (activeServer) activeServer->stop();
  });
  server.run();
  activeServer = nullptr;
  return 0;
}

int cmdResume(const Globals& g, const std::string& file, std::ostream& out) {
  SessionService service;
  std::vector<Json> transcript;
  Json snap;
  try {
    snap = Json::parse(readFile(file));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidRequest, std::string("malformed snapshot: ") + e.what());
  }
  const std::string id = service.restore(snap, &transcript);
  if (g.structured()) {
    out << Json(transcript).dump(2) << "\n";
    return 0;
  }
  Json graph = service.handle("graph-view", {{"session", id}});
  out << "session " << id << ": " << transcript.size() - 1 << " operations replayed, " << graph["nodes"].size()
      << " distinct states\n";
  for (const auto& n : graph["nodes"]) {
    out << "  " << n["representative"].get<std::string>() << " " << n["term"].get<std::string>();
    if (n["solution"] == true) out << "  (solution)";
    out << "\n";
  }
  return 0;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"narwhal: symbolic execution of order-sorted rewrite theories"};
  app.name("narwhal");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--assoc-bound", g.assocBound, "Associative unification bound")->check(CLI::PositiveNumber);
  app.add_option("--max-depth", g.maxDepth, "Depth bound (search / variant generation)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--max-count", g.maxCount, "Variant tree size bound")->check(CLI::PositiveNumber);
  app.add_option("--max-solutions", g.maxSolutions, "Number of solutions requested")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "Equational step budget")->check(CLI::PositiveNumber);

  std::string module, t1, t2;
  bool trace = false;
  auto* reduce = app.add_subcommand("reduce", "Normalize a term with the equations");
  reduce->add_option("module", module)->required();
  reduce->add_option("term", t1)->required();
  reduce->add_flag("--trace", trace, "Print the numbered reduction steps");

  auto* unifyAx = app.add_subcommand("unify-ax", "Unify two terms modulo the axioms");
  unifyAx->add_option("module", module)->required();
  unifyAx->add_option("t1", t1)->required();
  unifyAx->add_option("t2", t2)->required();

  auto* variantUnify = app.add_subcommand("variant-unify", "Unify two terms modulo the equations");
  variantUnify->add_option("module", module)->required();
  variantUnify->add_option("t1", t1)->required();
  variantUnify->add_option("t2", t2)->required();

  auto* transform = app.add_subcommand("transform", "Print the transformed program");
  transform->add_option("module", module)->required();

  auto* search = app.add_subcommand("search", "Reachability by narrowing: t =>* t'");
  search->add_option("module", module)->required();
  search->add_option("term", t1)->required();
  search->add_option("goal", t2, "'=>* <term>'")->required();

  int depth = 2;
  std::optional<std::string> target;
  auto* tree = app.add_subcommand("narrow-tree", "Dump a depth-bounded narrowing tree");
  tree->add_option("module", module)->required();
  tree->add_option("term", t1)->required();
  tree->add_option("--depth", depth, "Tree depth")->capture_default_str();
  tree->add_option("--target", target, "Goal term; solution nodes are marked");

  int port = defaultPort();
  std::string host = "127.0.0.1", snapshotDir;
  std::vector<std::string> resumeFiles;
  auto* serve = app.add_subcommand("serve", "Serve the wire API over HTTP");
  serve->add_option("--port", port, "Port (default NARWHAL_PORT or 8080)");
  serve->add_option("--host", host, "Interface to bind")->capture_default_str();
  serve->add_option("--snapshot-dir", snapshotDir, "Write a snapshot per session after each change")
      ->check(CLI::ExistingDirectory);
  serve->add_option("--resume", resumeFiles, "Snapshots to restore before serving");

  std::string snapshotFile;
  auto* resume = app.add_subcommand("resume", "Replay a session snapshot");
  resume->add_option("snapshot", snapshotFile)->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*reduce) return cmdReduce(g, module, t1, trace, out);
    if (*unifyAx) return cmdUnifyAx(g, module, t1, t2, out);
    if (*variantUnify) return cmdVariantUnify(g, module, t1, t2, out);
    if (*transform) return cmdTransform(g, module, out, err);
    if (*search) return cmdSearch(g, module, t1, t2, out);
    if (*tree) return cmdNarrowTree(g, module, t1, target, depth, out);
    if (*serve) return cmdServe(port, host, snapshotDir, resumeFiles, out, err);
    if (*resume) return cmdResume(g, snapshotFile, out);
  } catch (const Error& e) {
    err << "error: " << errorCodeName(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace narwhal
