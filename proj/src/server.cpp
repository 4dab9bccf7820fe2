#include "temai/server.hpp"

#include <fmt/format.h>
#include <httplib.h>

namespace temai::api {

HttpServer::HttpServer(Api& api) : api_(api), server_(std::make_unique<httplib::Server>()) {
  const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      r.headers.emplace(std::move(key), v);
    }
    const Response out = api_.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get(".*", dispatch);
  server_->Post(".*", dispatch);
  server_->Put(".*", dispatch);
  server_->Delete(".*", dispatch);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::validation, fmt::format("cannot bind {}:{}", host, port), "port");
  }
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::start() {
  worker_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  server_->stop();
  if (worker_.joinable()) worker_.join();
}

int run_server(const store::Config& config) {
  store::Workspace workspace(config);
  Api api(workspace);
  HttpServer server(api);
  const int port = server.bind(config.host, config.port);
  fmt::print("temai listening on {}:{}\n", config.host, port);
  std::fflush(stdout);
  server.listen();
  return 0;
}

}  // namespace temai::api
