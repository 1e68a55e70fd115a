// Acceptance run: one PASS/FAIL line per criterion, each under a fixed wall
// clock limit. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include "narwhal/cli.hpp"
#include "narwhal/module_language.hpp"
#include "narwhal/narrowing.hpp"
#include "narwhal/transform.hpp"
#include "narwhal/variant.hpp"
#include "narwhal/wire.hpp"
#include "support.hpp"

using namespace narwhal;

namespace {

const std::string kPal = "(S -> 0 S 0) ; (S -> 1 S 1) ; (S -> eps)";
const std::string kPalOpen = "(N:NSymbol -> T:TSymbol) ; " + kPal;
const std::string kFaulty = "(S -> 0 A 2) ; (S -> 0 2) ; (0 A -> 0 0 A 2) ; (0 A -> 0 2)";
const std::string kInversion = "(S -> 0 S 1) ; (S -> 1 0)";

std::string corpus(const std::string& f) { return std::string(NARWHAL_CORPUS_DIR) + "/" + f; }

struct Outcome {
  bool ok = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

std::string cli(const std::vector<std::string>& args, int* code = nullptr) {
  std::ostringstream out, err;
  int c = runCli(args, out, err);
  if (code) *code = c;
  return out.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string squash(const std::string& s) {
  return std::regex_replace(std::regex_replace(s, std::regex("\\s+"), " "), std::regex("^ | $"), "");
}

Json call(SessionService& svc, const std::string& endpoint, const Json& req) {
  int status = 0;
  Json out = svc.handle(endpoint, req, &status);
  if (status != 200) throw std::runtime_error(endpoint + ": " + out.dump());
  return out;
}

std::string createGrammarSession(SessionService& svc, const std::string& input, const std::string& target) {
  Json c = call(svc, "create-session", {{"module", test::readCorpus("grammar-int.maude")},
                                        {"mode", "re-narrowing"},
                                        {"input", input},
                                        {"target", target}});
  return c["session"];
}

std::set<std::string> bindingSet(const Json& subst) {
  std::set<std::string> out;
  for (const auto& b : subst["bindings"]) out.insert(b["var"].get<std::string>() + " / " + b["term"].get<std::string>());
  return out;
}

// ---------------------------------------------------------------------------

Outcome footnoteTrace() {
  std::string out = cli({"reduce", corpus("int-cs.maude"), "< s(0), s(0) + p(0) >", "--trace"});
  std::vector<std::string> labels;
  std::string result;
  std::smatch m;
  for (const auto& l : lines(out)) {
    if (std::regex_search(l, m, std::regex("^\\d+\\. \\[([^\\]]+)\\]"))) labels.push_back(m[1]);
    if (l.rfind("result ", 0) == 0) result = l;
  }
  if (labels != std::vector<std::string>{"e2", "e1", "e4"}) return fail("labels: " + out);
  if (result != "result State: < s(0), 0 >") return fail(result);
  return {true, "e2 e1 e4 -> < s(0), 0 >"};
}

Outcome integerNarrowing() {
  auto th = transformTheory(*test::loadCorpus("int-cs.maude")).theory;
  Term t = normalForm(*th, parseTerm(*th, "< 0, 0 + s(Z:Int) >"));
  Term expected = parseTerm(*th, "< p(0), s(s(Z:Int)) >");
  VarGen gen(freshStartAbove({t}));
  for (const auto& s : reNarrowChildren(*th, t, {}, varsOf(t), gen)) {
    if (!equalModAxAndRenaming(th->signature(), s.term, expected)) continue;
    std::string subst = printSubstitution(th->signature(), s.ruleSubstitution);
    if (subst == "{X:Int / p(0), Y:Int / s(Z:Int)}") return {true, subst};
    return fail("substitution " + subst);
  }
  return fail("no step to < p(0), s(s(Z)) >");
}

Outcome commutativeUnification() {
  auto th = transformTheory(*test::loadCorpus("mult-c.maude")).theory;
  VarGen gen;
  auto r = variantUnifyTerms(*th, parseTerm(*th, "s(0) * 0"), parseTerm(*th, "U * s(V)"), gen);
  std::string all;
  for (const auto& u : r.unifiers) all += printSubstitution(th->signature(), u);
  if (r.unifiers.size() != 1 || all != "{U:Nat / 0, V:Nat / 0}" || !r.complete) return fail(all);
  return {true, all};
}

Outcome grammarInversion() {
  int code = 0;
  std::string word = cli({"search", "--max-depth", "4", corpus("grammar-int.maude"), "S @ " + kInversion,
                          "=>* 0 0 1 0 1 1 @ " + kInversion},
                         &code);
  if (code != 0 || word.find("Solution 1 (depth 3)") == std::string::npos) return fail(word);
  std::string inv = cli({"search", "--max-depth", "4", corpus("grammar-int.maude"), "S @ " + kInversion,
                         "=>* 0 0 1 W:String @ " + kInversion},
                        &code);
  if (code != 0 || inv.find("W:String --> 0 1 1") == std::string::npos) return fail(inv);
  return {true, "depth 3, W = 0 1 1"};
}

Outcome faultyGrammar() {
  SessionService svc;
  std::string sid = createGrammarSession(svc, "N:NSymbol @ " + kFaulty, "0 2 2 @ " + kFaulty);
  Json r = call(svc, "expand-subtree", {{"session", sid}, {"node", "s1"}, {"depth", 3}});
  auto th = transformTheory(*test::loadCorpus("grammar-int.maude")).theory;
  Term goal = parseTerm(*th, "0 2 2 @ " + kFaulty);
  for (const auto& n : r["nodes"]) {
    if (!termEqual(parseTerm(*th, n["term"].get<std::string>()), goal)) continue;
    if (n["substitution"]["text"] == "{N:NSymbol / S}")
      return {true, n["id"].get<std::string>() + " at depth " + std::to_string(n["depth"].get<int>())};
  }
  return fail("0 2 2 not reached with {N/S}");
}

Outcome solutionOf(const std::string& input, const std::string& target, const std::set<std::string>& want,
                   bool exact) {
  SessionService svc;
  std::string sid = createGrammarSession(svc, input, target);
  Json r = call(svc, "expand-subtree", {{"session", sid}, {"node", "s1"}, {"depth", 3}});
  for (const auto& n : r["nodes"]) {
    if (n["solution"] != true) continue;
    Json t = call(svc, "inspect-transition", {{"session", sid}, {"edge", n["edge"]}});
    std::set<std::string> got = bindingSet(t["answer"]);
    bool ok = exact ? got == want : std::includes(got.begin(), got.end(), want.begin(), want.end());
    if (ok) return {true, n["id"].get<std::string>() + " " + t["answer"]["text"].get<std::string>()};
  }
  return fail("no solution with the expected answer");
}

Outcome unifierInspection() {
  SessionService svc;
  std::string sid = createGrammarSession(svc, "N:NSymbol @ " + kPal, "0 1 1 0 @ " + kPal);
  Json e = call(svc, "expand-node", {{"session", sid}, {"node", "s1"}});
  for (const auto& ed : e["edges"])
    for (const auto& n : e["nodes"]) {
      if (n["id"] != ed["to"] || n["term"].get<std::string>().rfind("0 S 0 @", 0) != 0) continue;
      Json u = call(svc, "inspect-unifier", {{"session", sid}, {"edge", ed["id"]}});
      std::set<std::string> want{"G:Grammar / (S -> eps) ; (S -> 1 S 1)", "L1:String / eps", "L2:String / eps",
                                 "U:String / S", "V:String / 0 S 0", "N:NSymbol / S"};
      const std::string leaf = u["highlighted"]["leaf"];
      bool success = false;
      for (const auto& c : u["nodes"])
        if (c["id"] == leaf) success = c["term"] == "tt";
      if (!success) return fail("highlighted leaf is not tt");
      if (bindingSet(u["composed"]) != want) return fail(u["composed"]["text"]);
      return {true, u["child"].get<std::string>() + " leaf " + leaf};
    }
  return fail("edge to 0 S 0 not found");
}

Outcome transformListing() {
  std::string out = squash(cli({"transform", corpus("grammar-int.maude")}));
  const std::vector<std::string> listing{
      "eq X:[Bool] =?= X:[Bool] = tt [variant] .",
      "eq X:[String] =?= X:[String] = tt [variant] .",
      "eq X:[Grammar] =?= X:[Grammar] = tt [variant] .",
      "eq X:[Conf] =?= X:[Conf] = tt [variant] .",
      "eq [AU1] : eps X:String = X:String [variant] .",
      "eq [AU2] : X:String eps = X:String [variant] .",
      "eq [AU3] : X:String eps Y:String = X:String Y:String [variant] .",
  };
  for (const auto& l : listing)
    if (out.find(l) == std::string::npos) return fail("missing: " + l);
  return {true, "7 equations present"};
}

Outcome propertySuites(const std::string& binary) {
  FILE* p = popen((binary + " 2>&1").c_str(), "r");
  if (!p) return fail("cannot run " + binary);
  std::string text;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) text.append(buf, n);
  int status = pclose(p);
  std::smatch m;
  std::string summary;
  if (std::regex_search(text, m, std::regex("test cases:[^\\n]*"))) summary = squash(m.str());
  if (status != 0 || text.find("Status: SUCCESS") == std::string::npos) return fail(summary.empty() ? text : summary);
  return {true, summary};
}

std::string replay() {
  SessionService svc;
  std::string sid = createGrammarSession(svc, "N:NSymbol @ " + kPal, "0 1 1 0 @ " + kPal);
  std::string dump;
  auto log = [&](const Json& j) { dump += j.dump() + "\n"; };
  Json r = call(svc, "expand-subtree", {{"session", sid}, {"node", "s1"}, {"depth", 3}});
  log(r);
  for (const auto& ed : r["edges"]) {
    log(call(svc, "inspect-transition", {{"session", sid}, {"edge", ed["id"]}}));
    log(call(svc, "instrumented-view", {{"session", sid}, {"edge", ed["id"]}}));
  }
  for (const auto& n : r["nodes"])
    if (n["solution"] == true) log(call(svc, "inspect-unifier", {{"session", sid}, {"edge", n["edge"]}}));
  log(call(svc, "fold-node", {{"session", sid}, {"node", "s2"}}));
  log(call(svc, "graph-view", {{"session", sid}}));
  log(call(svc, "unfold-node", {{"session", sid}, {"node", "s2"}}));
  log(call(svc, "graph-view", {{"session", sid}}));
  log(call(svc, "show-program", {{"session", sid}}));
  log(svc.snapshot(sid));
  return dump;
}

Outcome determinism() {
  std::string a = replay(), b = replay();
  if (a != b) return fail("replays differ");
  return {true, std::to_string(a.size()) + " bytes identical"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string properties = argc > 1 ? argv[1] : NARWHAL_PROPERTIES_BIN;
  struct Criterion {
    int id;
    double limit;  // seconds
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 1, "reduce trace e2 e1 e4", footnoteTrace},
      {2, 1, "integer narrowing step", integerNarrowing},
      {3, 1, "C-unification via variants", commutativeUnification},
      {4, 5, "grammar search and inversion", grammarInversion},
      {5, 5, "faulty grammar reaches 0 2 2", faultyGrammar},
      {6, 10, "palindrome 0110 answer",
       [] { return solutionOf("N:NSymbol @ " + kPal, "0 1 1 0 @ " + kPal, {"N:NSymbol / S"}, false); }},
      {7, 30, "missing production answer",
       [] {
         return solutionOf("S @ " + kPalOpen, "0 0 1 0 0 @ " + kPalOpen, {"N:NSymbol / S", "T:TSymbol / 1"}, true);
       }},
      {8, 10, "inspect-unifier composed substitution", unifierInspection},
      {9, 1, "transform listing", transformListing},
      {10, 300, "property suites", [&] { return propertySuites(properties); }},
      {11, 20, "replay determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs >= c.limit) o = fail("over time limit");
    if (!o.ok) ++failures;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3fs/%.0fs", secs, c.limit);
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << " (" << timing << ") "
              << o.detail << "\n";
  }
  return failures;
}
