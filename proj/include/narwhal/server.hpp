#pragma once

#include <memory>
#include <string>

#include "narwhal/wire.hpp"

namespace narwhal {

/// HTTP front end: `POST /<endpoint>` with a JSON body for each wire
/// endpoint. Responses are JSON; errors carry a 4xx/5xx status.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service, std::string snapshotDir = {});
  ~HttpServer();

  /// Binds and returns the port (0 picks a free one); -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until `stop()`.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `NARWHAL_PORT` when set and valid, 8080 otherwise.
int defaultPort();

}  // namespace narwhal
