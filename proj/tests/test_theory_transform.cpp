#include "doctest.h"

#include <regex>

#include "narwhal/error.hpp"
#include "narwhal/module_language.hpp"
#include "narwhal/transform.hpp"
#include "support.hpp"

using namespace narwhal;

namespace {

std::string squash(const std::string& s) { return std::regex_replace(s, std::regex("\\s+"), " "); }

int variantCount(const Theory& th) {
  int n = 0;
  for (const auto& e : th.equations) n += e.variant ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("grammar transformation listing") {
  auto original = test::loadCorpus("grammar-int.maude");
  auto t = transformTheory(*original);
  std::string text = squash(printTheory(*t.theory));
  for (const char* k : {"Bool", "String", "Grammar", "Conf"})
    CHECK(text.find(std::string("eq X:[") + k + "] =?= X:[" + k + "] = tt [variant] .") != std::string::npos);
  CHECK(text.find("op __ : String String -> String [assoc] . "
                  "eq [AU1] : eps X:String = X:String [variant] . "
                  "eq [AU2] : X:String eps = X:String [variant] . "
                  "eq [AU3] : X:String eps Y:String = X:String Y:String [variant] .") != std::string::npos);
  CHECK(text.find("op _=?=_ : Universal Universal -> [Bool] [poly (1 2)] .") != std::string::npos);
  CHECK(text.find("op tt : -> [Bool] .") != std::string::npos);
  CHECK(text.find("op _;_ : Grammar Grammar -> Grammar [assoc comm id: mt] .") != std::string::npos);
  CHECK(t.report.replacedOps == std::vector<std::string>{"__"});
  // (#kinds + 1) + 3 * #AU
  CHECK(variantCount(*t.theory) == 4 + 3);
  CHECK(t.theory->rules.size() == 1);
  // the original theory is untouched
  CHECK(original->signature().symbol(*original->signature().findSymbol("__", 2)).attrs.idKind ==
        IdentityKind::Both);
}

TEST_CASE("transformed program reads back") {
  auto t = transformTheory(*test::loadCorpus("grammar-int.maude"));
  std::string printed = printTheory(*t.theory);
  auto back = parseModule(printed, true);
  CHECK(printTheory(*back) == printed);
}

TEST_CASE("single sort theory gets two unification equations") {
  auto th = parseModule("mod ONE is sort E . op a : -> E . endm");
  auto t = addUnificationInfrastructure(*th);
  CHECK(variantCount(*t.theory) == 2);
  try {
    addUnificationInfrastructure(*t.theory);
    FAIL("expected a name clash");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NameClash);
  }
}

TEST_CASE("theories without identities are unchanged by the AU step") {
  auto th = test::loadCorpus("int-cs.maude");
  auto t = transformAU(*th);
  CHECK(t.report.replacedOps.empty());
  CHECK(t.report.addedEquations.empty());
  CHECK(printTheory(*t.theory) == printTheory(*th));
}

TEST_CASE("identity without assoc is compiled but printed as declared") {
  auto th = parseModule(R"(
mod CU is
  sort E .
  ops a e : -> E .
  op _+_ : E E -> E [comm id: e] .
endm
)");
  auto t = transformTheory(*th);
  CHECK(variantCount(*t.theory) == 2 + 2);
  std::string text = printTheory(*t.theory);
  CHECK(text.find("op _+_ : E E -> E [comm id: e] .") != std::string::npos);
  CHECK(text.find("CU1") == std::string::npos);
}

TEST_CASE("executability diagnostics") {
  auto grammar = transformTheory(*test::loadCorpus("grammar-int.maude"));
  CHECK(grammar.report.diagnostics.empty());
  auto cs = transformTheory(*test::loadCorpus("int-cs.maude"));
  CHECK(extraVariableCount(cs.theory->rules[0]) == 0);
  auto inner = parseModule(R"(
mod INNER is
  sorts Sym Str .
  subsort Sym < Str .
  ops a b : -> Sym .
  op __ : Str Str -> Str [assoc] .
  rl a => b [narrowing] .
endm
)");
  auto d = checkExecutability(*inner);
  REQUIRE(d.size() == 1);
  CHECK(d[0].code == "non-topmost");
  CHECK(d[0].message.find("non-topmost: narrowing completeness not guaranteed") != std::string::npos);
}
