#include "judge/service/http.hpp"

#include "judge/core/base64.hpp"
#include "judge/problem/package.hpp"

#include <httplib.h>

namespace judge::service {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& name, const std::string& message,
                Json extra = Json::object()) {
  Json body{{"error", name}, {"message", message}};
  body.update(extra);
  send_json(res, status, body);
}

/// Maps module errors onto HTTP statuses.
template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const UnknownProblem& e) {
      send_error(res, 404, "UnknownProblem", e.what());
    } catch (const UnknownSubmission& e) {
      send_error(res, 404, "UnknownSubmission", e.what());
    } catch (const PayloadTooLarge& e) {
      send_error(res, 413, "PayloadTooLarge", e.what());
    } catch (const DuplicateProblem& e) {
      send_error(res, 409, "DuplicateProblem", e.what());
    } catch (const PackageMalformed& e) {
      send_error(res, 422, "PackageMalformed", e.what(), {{"diagnostics", e.diagnostics()}});
    } catch (const InvalidRequest& e) {
      send_error(res, 400, "InvalidRequest", e.what());
    } catch (const FormatError& e) {
      send_error(res, 400, "InvalidRequest", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

Json body_object(const httplib::Request& req) {
  Json j;
  try {
    j = Json::parse(req.body);
  } catch (const std::exception& e) {
    throw InvalidRequest(std::string("body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidRequest("body must be a JSON object");
  return j;
}

std::string string_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) throw InvalidRequest(std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

std::string decode_b64(const std::string& text, const char* field) {
  try {
    return base64_decode(text);
  } catch (const std::exception& e) {
    throw InvalidRequest(std::string(field) + ": " + e.what());
  }
}

}  // namespace

HttpServer::HttpServer(JudgeService& service)
    : service_(&service), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;
  // Large enough for any binary a problem accepts once base64-encoded;
  // the service applies the real caps.
  svr.set_payload_max_length(512ull * 1024 * 1024);

  svr.Post("/api/problems", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto& token = service_->config().admin_token;
             if (token.empty() || req.get_header_value("X-Judge-Admin") != token) {
               send_error(res, 403, "Forbidden", "X-Judge-Admin header missing or wrong");
               return;
             }
             const auto id = service_->register_package(string_field(body_object(req), "path"));
             send_json(res, 201, {{"problem_id", id}});
           }));

  svr.Get("/api/problems", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, service_->problems_json());
          }));

  svr.Get(R"(/api/problems/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service_->problem_json(req.matches[1]));
          }));

  svr.Post(R"(/api/problems/([^/]+)/submissions)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const Json body = body_object(req);
             const auto user = string_field(body, "user_id");
             const bool has_src = body.contains("source_b64"), has_bin = body.contains("binary_b64");
             if (has_src == has_bin) throw InvalidRequest("give exactly one of source_b64 and binary_b64");
             Payload payload;
             if (has_src) {
               const auto language = string_field(body, "language_id");
               auto data = decode_b64(string_field(body, "source_b64"), "source_b64");
               payload = SourcePayload{language, {{"main", std::move(data)}}};
             } else {
               payload = BinaryPayload{decode_b64(string_field(body, "binary_b64"), "binary_b64")};
             }
             const auto id = service_->submit(req.matches[1], user, std::move(payload));
             send_json(res, 202, {{"submission_id", id}});
           }));

  svr.Get(R"(/api/submissions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service_->submission_json(req.matches[1]));
          }));

  svr.Get(R"(/api/problems/([^/]+)/leaderboard)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service_->leaderboard_json(req.matches[1]));
          }));

  svr.Get(R"(/api/problems/([^/]+)/replay\.csv)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            res.status = 200;
            res.set_content(service_->replay_csv(req.matches[1]), "text/csv");
          }));

  const auto& ui = service_->config().ui_dir;
  std::error_code ec;
  if (!ui.empty() && std::filesystem::is_directory(ui, ec)) {
    svr.set_mount_point("/ui", ui.string());
    svr.Get("/ui", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw InfrastructureError("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw InfrastructureError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace judge::service
