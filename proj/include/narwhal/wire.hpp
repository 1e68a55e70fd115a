#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "narwhal/error.hpp"
#include "narwhal/session.hpp"

namespace narwhal {

// Insertion-ordered so that printed responses are stable and readable.
using Json = nlohmann::ordered_json;

namespace wire {

Json substitution(const Theory& theory, const Substitution& s);
Json node(const Session& s, int id);
Json edge(const Session& s, int id);
Json transition(const Session& s, int edge);
Json trace(const Theory& theory, const NormalForm& nf);
Json graph(const Session& s);
Json program(const Session& s);
Json diagnostics(const std::vector<Diagnostic>& ds);
Json error(ErrorCode code, const std::string& message);

/// Structured renderings shared by the CLI.
Json reductionStep(const Theory& theory, const ReductionStep& step, int index);
Json narrowingStep(const Theory& theory, const NarrowingStep& step);

int httpStatus(ErrorCode code);

}  // namespace wire

/// In-memory session store behind the wire API. Operations on one session
/// are serialized; inspections share a reader lock.
class SessionService {
 public:
  static const std::vector<std::string>& endpoints();

  /// Dispatches one request. Never throws: failures become
  /// `{"error": {"code", "message"}}` and `status` is set accordingly.
  Json handle(const std::string& endpoint, const Json& request, int* status = nullptr);

  /// Versioned operation log of a top-level session and its unifier
  /// sessions; `restore` replays it into this service and returns the new
  /// session id. A hand-written log may also contain read-only endpoints;
  /// `transcript` receives every response, creation first.
  Json snapshot(const std::string& session) const;
  std::string restore(const Json& snapshot, std::vector<Json>* transcript = nullptr);

  std::size_t size() const;

 private:
  struct Entry {
    std::unique_ptr<Session> session;
    mutable std::shared_mutex mu;
    std::string root;  // top-level session owning the log
  };
  struct Log {
    Json create;
    std::vector<Json> ops;
  };

  Json dispatch(const std::string& endpoint, const Json& request);
  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string nextId();
  void record(const std::string& root, Json op);

  Json createSession(const Json& req);
  Json expandNode(const Json& req);
  Json expandSubtree(const Json& req);
  Json foldNode(const Json& req, bool fold);
  Json inspectTransition(const Json& req);
  Json inspectUnifier(const Json& req);
  Json instrumentedView(const Json& req);
  Json graphView(const Json& req);
  Json showProgram(const Json& req);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, Log> logs_;
  int counter_ = 0;
};

/// Builds a session request from its wire form.
CreateRequest parseCreateRequest(const Json& req);
Json boundsJson(const Bounds& b);

}  // namespace narwhal
