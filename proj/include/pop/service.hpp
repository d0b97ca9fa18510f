#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace pop {

struct ServiceOptions {
  std::string addr = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::vector<std::string> cors_origins;
  /// Sessions and uploaded instances are mirrored here and reloaded at start.
  std::string session_dir;
};

/// HTTP/JSON facade over instances and sessions.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the socket; returns the bound port. Throws std::runtime_error.
  int bind();
  /// Serves until stop(); call bind() first.
  void listen();
  void stop();

  static nlohmann::json openapi();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// bind + listen.
void run_service(const ServiceOptions& options);

}  // namespace pop
