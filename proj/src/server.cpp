#include "narwhal/server.hpp"

#include <cstdlib>
#include <fstream>

#include "httplib.h"

namespace narwhal {

struct HttpServer::Impl {
  SessionService& service;
  std::string snapshotDir;
  httplib::Server server;

  Impl(SessionService& s, std::string dir) : service(s), snapshotDir(std::move(dir)) {}

  void save(const Json& response) {
    if (snapshotDir.empty() || !response.contains("session")) return;
    const std::string id = response["session"];
    Json snap = service.snapshot(id);
    std::ofstream out(snapshotDir + "/" + snap["session"].get<std::string>() + ".json");
    out << snap.dump(2) << "\n";
  }
};

HttpServer::HttpServer(SessionService& service, std::string snapshotDir)
    : impl_(std::make_unique<Impl>(service, std::move(snapshotDir))) {
  auto& srv = impl_->server;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  for (const auto& name : SessionService::endpoints()) {
    srv.Post("/" + name, [this, name](const httplib::Request& req, httplib::Response& res) {
      Json body;
      int status = 200;
      Json out;
      try {
        body = req.body.empty() ? Json::object() : Json::parse(req.body);
      } catch (const Json::parse_error& e) {
        out = wire::error(ErrorCode::InvalidRequest, std::string("malformed JSON body: ") + e.what());
        status = 400;
      }
      if (status == 200) out = impl_->service.handle(name, body, &status);
      const bool mutates = name != "inspect-transition" && name != "instrumented-view" && name != "graph-view" &&
                           name != "show-program";
      if (status == 200 && mutates) impl_->save(out);
      res.status = status;
      res.set_content(out.dump(), "application/json");
    });
  }
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

int defaultPort() {
  if (const char* env = std::getenv("NARWHAL_PORT")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0 && v < 65536) return static_cast<int>(v);
  }
  return 8080;
}

}  // namespace narwhal
