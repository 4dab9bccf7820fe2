#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "temai/error.hpp"
#include "temai/serialization.hpp"
#include "temai/store.hpp"

namespace temai::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;

  /// Splits "path?query" and percent-decodes the query.
  static Request make(std::string method, std::string_view target, std::string body = {},
                      std::map<std::string, std::string> headers = {});

  std::optional<std::string> header(std::string_view name) const;
  std::optional<std::string> param(const std::string& name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  Json json() const { return parse_json(body); }
};

int http_status(ErrorCode code) noexcept;
/// {"code", "message", "field_path"} with the status for the error class.
Response error_response(const Error& error);

/// Routes requests to the engine. Safe to call from many threads.
class Api {
 public:
  explicit Api(store::Workspace& workspace);

  Response handle(const Request& request);

 private:
  struct Replay {
    std::mutex mu;
    std::string fingerprint;
    std::optional<Response> response;
  };

  Response route(const Request& request);
  Response idempotent(const Request& request, const std::string& key);

  store::Workspace& ws_;
  std::mutex replay_mu_;
  std::map<std::string, std::shared_ptr<Replay>> replays_;
};

}  // namespace temai::api
