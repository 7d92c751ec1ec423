#include "mixel/http_api.hpp"

#include <vector>

#include "httplib.h"
#include "mixel/errors.hpp"
#include "mixel/pattern.hpp"
#include "mixel/pattern_io.hpp"
#include "mixel/wire.hpp"

namespace mixel {
namespace {

using nlohmann::json;

ApiResponse error_response(int status, std::string_view kind, const std::string& message, json extra = json::object()) {
  extra["kind"] = kind;
  extra["message"] = message;
  return {status, {{"error", std::move(extra)}}};
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto start = path.find_first_not_of('/');
    if (start == std::string_view::npos) {
      break;
    }
    path.remove_prefix(start);
    const auto end = path.find('/');
    parts.push_back(path.substr(0, end));
    path.remove_prefix(end == std::string_view::npos ? path.size() : end);
  }
  return parts;
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body.empty() ? std::string_view("{}") : body);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < body.size(); ++i) {
      if (body[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("malformed JSON body", line, column);
  }
}

const json& require(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return body.at(key);
}

json error_detail(const std::exception& e) {
  json detail = json::object();
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    detail["line"] = p->line();
    detail["column"] = p->column();
  } else if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    if (v->has_cell()) {
      detail["row"] = v->row();
      detail["col"] = v->col();
    }
  }
  return detail;
}

// Maps a library exception to its HTTP status and error kind.
ApiResponse map_exception(const std::exception& e) {
  const std::string msg = e.what();
  if (dynamic_cast<const ParseError*>(&e)) return error_response(400, "parse", msg, error_detail(e));
  if (dynamic_cast<const json::exception*>(&e)) return error_response(400, "bad_request", msg);
  if (dynamic_cast<const NotFoundError*>(&e)) return error_response(404, "not_found", msg);
  if (dynamic_cast<const ValidationError*>(&e)) return error_response(422, "validation", msg, error_detail(e));
  if (dynamic_cast<const ShapeError*>(&e)) return error_response(422, "shape", msg);
  if (dynamic_cast<const VersionError*>(&e)) return error_response(422, "version", msg);
  if (dynamic_cast<const SizeError*>(&e)) return error_response(422, "size", msg);
  if (dynamic_cast<const RangeError*>(&e)) return error_response(422, "range", msg);
  if (dynamic_cast<const DomainError*>(&e)) return error_response(422, "domain", msg);
  if (dynamic_cast<const ConfigError*>(&e)) return error_response(422, "config", msg);
  if (dynamic_cast<const Error*>(&e)) return error_response(422, "error", msg);
  return error_response(500, "internal", msg);
}

ApiResponse validate_pattern(std::string_view body) {
  try {
    const auto file = load_pattern(body);
    return {200,
            {{"valid", true},
             {"rows", file.grid.rows()},
             {"cols", file.grid.cols()},
             {"has_mask", file.grid.has_mask()},
             {"write_count", file.grid.write_count()},
             {"metadata", file.metadata}}};
  } catch (const Error& e) {
    auto err = map_exception(e);
    return {200, {{"valid", false}, {"error", err.body["error"]}}};
  }
}

ApiResponse design_hadamard(const json& body) {
  const auto order = require(body, "order").get<std::size_t>();
  const auto grid = sylvester_hadamard(order);
  return {200, {{"order", order}, {"pattern", pattern_to_json(grid, {{"name", "H" + std::to_string(order)}})}}};
}

ApiResponse design_canvas(const json& body) {
  PixelGrid token;
  if (body.contains("token")) {
    token = pattern_from_json(body.at("token")).grid;
  } else {
    token = sylvester_hadamard(require(body, "order").get<std::size_t>());
  }
  const auto layout = canvas_compile(token, wire::assignments_from_json(require(body, "assignments")));
  return {200, wire::canvas_to_json(layout)};
}

ApiResponse predict_map(const json& body) {
  const auto a = pattern_from_json(require(body, "a")).grid;
  const auto b = pattern_from_json(require(body, "b")).grid;
  const auto norm = normalization_from_string(body.value("normalization", std::string("overlap")));
  const double pixel_force = body.value("pixel_force", kDefaultPixelForceN);
  if (!(pixel_force > 0.0)) {
    throw DomainError("pixel_force must be positive");
  }
  const auto map = interaction_map(a, b, norm);
  json out = wire::interaction_map_to_json(map, pixel_force);
  if (body.contains("offset")) {
    const Offset o{body.at("offset").at("dx").get<long>(), body.at("offset").at("dy").get<long>()};
    const double v = map.ncc(o);
    const auto n = map.overlap(o);
    out["at"] = {
        {"dx", o.dx},
        {"dy", o.dy},
        {"ncc", v},
        {"overlap", n},
        {"force_newtons", force_estimate(v, static_cast<long>(n), pixel_force).newtons},
        {"interaction", to_string(classify(v))},
    };
  }
  return {200, std::move(out)};
}

}  // namespace

HttpApi::HttpApi(ControlService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = handle(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(reply.body.dump(), "application/json");
  };
  server_->Get(R"(/.*)", route);
  server_->Post(R"(/.*)", route);
  server_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpApi::~HttpApi() { stop(); }

ApiResponse HttpApi::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const auto parts = split_path(path);
  const bool post = method == "POST";
  const bool get = method == "GET";
  try {
    if (post && parts.size() == 2 && parts[0] == "patterns" && parts[1] == "validate") {
      return validate_pattern(body);
    }
    if (post && parts.size() == 2 && parts[0] == "design") {
      const json req = parse_body(body);
      if (parts[1] == "hadamard") return design_hadamard(req);
      if (parts[1] == "pairs") return {200, wire::pair_set_to_json(generate_pair_set(wire::pair_request_from_json(req)))};
      if (parts[1] == "canvas") return design_canvas(req);
    }
    if (post && parts.size() == 2 && parts[0] == "predict" && parts[1] == "map") {
      return predict_map(parse_body(body));
    }
    if (get && parts.size() == 1 && parts[0] == "devices") {
      return {200, {{"devices", service_.device_ids()}}};
    }
    if (parts.size() == 3 && parts[0] == "devices") {
      const std::string device(parts[1]);
      if (post && parts[2] == "plot") {
        const json req = parse_body(body);
        PixelGrid grid = pattern_from_json(require(req, "pattern")).grid;
        if (req.contains("base")) {
          grid = diff_delta(pattern_from_json(req.at("base")).grid, grid);
        }
        PlotOptions opts;
        opts.feed = req.value("feed", opts.feed);
        opts.dwell = req.value("dwell", opts.dwell);
        return {202, wire::job_to_json(service_.submit_plot(device, grid, opts), service_)};
      }
      if (post && parts[2] == "scan") {
        const json req = parse_body(body);
        const auto rows = require(req, "rows").get<std::size_t>();
        const auto cols = require(req, "cols").get<std::size_t>();
        return {202, wire::job_to_json(service_.submit_scan(device, rows, cols), service_)};
      }
      if (get && parts[2] == "sheet") {
        const auto sheet = service_.device_sheet(device);
        return {200, {{"device", device}, {"pattern", pattern_to_json(sheet, {{"device", device}})}}};
      }
    }
    if (get && parts.size() == 2 && parts[0] == "jobs") {
      return {200, wire::job_to_json(service_.job_status(std::string(parts[1])), service_)};
    }
  } catch (const std::exception& e) {
    return map_exception(e);
  }
  return error_response(404, "not_found", "no route for " + std::string(method) + " " + std::string(path));
}

bool HttpApi::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpApi::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpApi::listen_after_bind() { return server_->listen_after_bind(); }

void HttpApi::wait_until_ready() const { server_->wait_until_ready(); }

void HttpApi::stop() {
  if (server_) {
    server_->stop();
  }
}

}  // namespace mixel
