#pragma once

#include "judge/service/service.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace judge::service {

/// JSON API over a JudgeService, plus the static UI under /ui.
///
///   POST /api/problems                      {"path": DIR}, X-Judge-Admin
///   GET  /api/problems
///   GET  /api/problems/{id}
///   POST /api/problems/{id}/submissions     {user_id, language_id,
///                                            source_b64 | binary_b64}
///   GET  /api/submissions/{id}
///   GET  /api/problems/{id}/leaderboard
///   GET  /api/problems/{id}/replay.csv
///
/// Errors come back as {"error": NAME, "message": TEXT}.
class HttpServer {
 public:
  explicit HttpServer(JudgeService& service);
  ~HttpServer();

  /// Binds; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void serve();
  void stop();

 private:
  JudgeService* service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace judge::service
