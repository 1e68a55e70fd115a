#include "doctest.h"

#include <thread>

#include "httplib.h"
#include "narwhal/server.hpp"
#include "support.hpp"

using namespace narwhal;

namespace {

const std::string kPal = "(S -> 0 S 0) ; (S -> 1 S 1) ; (S -> eps)";

struct Running {
  SessionService service;
  HttpServer server{service};
  int port = -1;
  std::thread thread;

  Running() {
    port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { server.run(); });
  }
  ~Running() {
    server.stop();
    thread.join();
  }
};

std::pair<int, Json> post(httplib::Client& cli, const std::string& endpoint, const Json& body) {
  auto res = cli.Post("/" + endpoint, body.dump(), "application/json");
  REQUIRE(res);
  return {res->status, Json::parse(res->body)};
}

}  // namespace

TEST_CASE("all ten endpoints over http") {
  Running r;
  httplib::Client cli("127.0.0.1", r.port);
  CHECK(SessionService::endpoints().size() == 10);

  auto [s1, created] = post(cli, "create-session",
                            {{"module", test::readCorpus("grammar-int.maude")},
                             {"mode", "re-narrowing"},
                             {"input", "N:NSymbol @ " + kPal},
                             {"target", "0 1 1 0 @ " + kPal}});
  REQUIRE(s1 == 200);
  const std::string sid = created["session"];
  std::vector<std::pair<std::string, Json>> calls{
      {"expand-node", {{"session", sid}, {"node", "s1"}}},
      {"expand-subtree", {{"session", sid}, {"node", "s2"}, {"depth", 1}}},
      {"fold-node", {{"session", sid}, {"node", "s2"}}},
      {"unfold-node", {{"session", sid}, {"node", "s2"}}},
      {"inspect-transition", {{"session", sid}, {"edge", "e1"}}},
      {"inspect-unifier", {{"session", sid}, {"edge", "e1"}}},
      {"instrumented-view", {{"session", sid}, {"edge", "e1"}}},
      {"graph-view", {{"session", sid}}},
      {"show-program", {{"session", sid}}},
  };
  for (const auto& [endpoint, body] : calls) {
    auto [status, out] = post(cli, endpoint, body);
    CHECK_MESSAGE(status == 200, endpoint << " " << out.dump());
    CHECK(!out.contains("error"));
  }

  auto [s404, unknown] = post(cli, "expand-node", {{"session", sid}, {"node", "s999"}});
  CHECK(s404 == 404);
  CHECK(unknown["error"]["code"] == "UnknownNode");
  auto [s409, again] = post(cli, "expand-node", {{"session", sid}, {"node", "s1"}});
  CHECK(s409 == 409);
  auto res = cli.Post("/graph-view", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(Json::parse(res->body)["error"]["code"] == "InvalidRequest");
  auto missing = cli.Post("/no-such-thing", "{}", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 404);
}

TEST_CASE("concurrent sessions") {
  Running r;
  std::vector<std::thread> clients;
  std::vector<int> ok(4, 0);
  for (int i = 0; i < 4; ++i)
    clients.emplace_back([&, i] {
      httplib::Client cli("127.0.0.1", r.port);
      auto res = cli.Post("/create-session",
                          Json{{"module", test::readCorpus("grammar-int.maude")},
                               {"mode", "re-narrowing"},
                               {"input", "N:NSymbol @ " + kPal}}
                              .dump(),
                          "application/json");
      if (!res || res->status != 200) return;
      const std::string sid = Json::parse(res->body)["session"];
      auto ex = cli.Post("/expand-subtree", Json{{"session", sid}, {"node", "s1"}, {"depth", 2}}.dump(),
                         "application/json");
      if (ex && ex->status == 200) ok[i] = static_cast<int>(Json::parse(ex->body)["nodes"].size());
    });
  for (auto& t : clients) t.join();
  for (int n : ok) CHECK(n == ok[0]);
  CHECK(ok[0] > 0);
  CHECK(r.service.size() == 4);
}

TEST_CASE("port from the environment") {
  setenv("NARWHAL_PORT", "9191", 1);
  CHECK(defaultPort() == 9191);
  setenv("NARWHAL_PORT", "junk", 1);
  CHECK(defaultPort() == 8080);
  unsetenv("NARWHAL_PORT");
  CHECK(defaultPort() == 8080);
}
