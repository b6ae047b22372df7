#pragma once

#include <aeroclass/service.hpp>

#include <httplib.h>

#include <memory>
#include <string>
#include <thread>

namespace aeroclass {

/// HTTP front end for a PredictionService. Optionally serves static files
/// (the browser UI) from `static_dir` at "/".
class HttpServer {
public:
  explicit HttpServer(const PredictionService& service, const std::string& static_dir = {}) : service_(service) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      const auto result = service_.handle(req.method, req.path, req.body);
      res.status = result.status;
      res.set_content(result.body.dump(), "application/json");
    };
    server_.Get("/api/v1/.*", route);
    server_.Post("/api/v1/.*", route);
    server_.Put("/api/v1/.*", route);
    server_.Delete("/api/v1/.*", route);
    if (!static_dir.empty() && !server_.set_mount_point("/", static_dir))
      throw Error("static directory '" + static_dir + "' does not exist");
  }

  ~HttpServer() { stop(); }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Blocks serving on host:port until stop() is called.
  void listen(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }

  /// Binds an ephemeral port and serves on a background thread.
  int start_background(const std::string& host = "127.0.0.1") {
    const int port = server_.bind_to_any_port(host);
    if (port < 0) throw Error("cannot bind " + host);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

private:
  const PredictionService& service_;
  httplib::Server server_;
  std::thread thread_;
};

} // namespace aeroclass
