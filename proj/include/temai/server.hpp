#pragma once

#include <memory>
#include <string>
#include <thread>

#include "temai/api.hpp"

namespace httplib {
class Server;
}

namespace temai::api {

/// HTTP transport for Api. One instance serves one listening socket.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void listen();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  Api& api_;
  std::unique_ptr<httplib::Server> server_;
  std::thread worker_;
};

/// Builds a workspace from `config` and serves until the process is stopped.
int run_server(const store::Config& config);

}  // namespace temai::api
