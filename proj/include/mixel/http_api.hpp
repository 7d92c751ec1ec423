#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mixel/control_service.hpp"

namespace httplib {
class Server;
}

namespace mixel {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// JSON-over-HTTP front end of a ControlService.
//
//   POST /patterns/validate     pattern document -> {"valid", ...}
//   POST /design/hadamard       {"order"} -> {"order", "pattern"}
//   POST /design/pairs          {"k", "order", "candidates", "mode", "seed"}
//   POST /design/canvas         {"token" | "order", "assignments"}
//   POST /predict/map           {"a", "b", "normalization"?, "pixel_force"?, "offset"?}
//   POST /devices/{id}/plot     {"pattern", "base"?, "feed"?, "dwell"?} -> 202 job
//   POST /devices/{id}/scan     {"rows", "cols"} -> 202 job
//   GET  /jobs/{id}             job
//   GET  /devices/{id}/sheet    {"device", "pattern", ...}
//   GET  /devices               {"devices": [...]}
//
// Errors come back as {"error": {"kind", "message", ...}} with 400 for
// malformed bodies, 404 for unknown routes, devices and jobs, and 422 for
// well-formed requests that fail validation.
class HttpApi {
 public:
  explicit HttpApi(ControlService& service);
  ~HttpApi();

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Transport-free dispatch; the socket server routes everything here.
  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  // Binds and serves until stop(). Returns false if the bind fails.
  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port and returns it (or -1); serve with
  // listen_after_bind() on another thread.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  ControlService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mixel
