// mixel: command-line front end for pattern design, compilation and the
// virtual plotter. Device subcommands run against an in-process service
// unless --server points at a running `mixel serve`.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "mixel/control_service.hpp"
#include "mixel/errors.hpp"
#include "mixel/http_api.hpp"
#include "mixel/magnet_model.hpp"
#include "mixel/pair_designer.hpp"
#include "mixel/pattern.hpp"
#include "mixel/pattern_io.hpp"
#include "mixel/toolpath.hpp"
#include "mixel/wire.hpp"

namespace {

using nlohmann::json;

constexpr auto kJobTimeout = std::chrono::minutes(10);

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw mixel::Error("cannot open " + path + " for writing");
  }
  out << text;
}

mixel::PlotterConfig plotter_config(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed) {
  mixel::PlotterConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.sensor.noise_sigma = sigma;
  cfg.seed = seed;
  return cfg;
}

json http_call(const std::string& server, const std::string& method, const std::string& path,
               const json& body = nullptr) {
  httplib::Client client(server);
  client.set_read_timeout(std::chrono::seconds(60));
  auto res = method == "GET" ? client.Get(path) : client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw mixel::Error("request to " + server + path + " failed: " + httplib::to_string(res.error()));
  }
  json reply = json::parse(res->body);
  if (res->status >= 400) {
    throw mixel::Error(reply.contains("error") ? reply["error"].value("message", res->body) : res->body);
  }
  return reply;
}

// Polls a remote job until it finishes; progress goes to stderr.
json poll_remote(const std::string& server, json job) {
  const auto deadline = std::chrono::steady_clock::now() + kJobTimeout;
  std::size_t last = static_cast<std::size_t>(-1);
  while (job["state"] == "queued" || job["state"] == "running") {
    if (std::chrono::steady_clock::now() > deadline) {
      throw mixel::Error("timed out waiting for " + job["id"].get<std::string>());
    }
    if (job["progress"].get<std::size_t>() != last) {
      last = job["progress"].get<std::size_t>();
      std::cerr << job["id"].get<std::string>() << ": " << last << "/" << job["total"] << "\n";
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    job = http_call(server, "GET", "/jobs/" + job["id"].get<std::string>());
  }
  return job;
}

json finish_local(mixel::ControlService& service, const mixel::Job& job) {
  const auto done = service.wait_for(job.id, kJobTimeout);
  return mixel::wire::job_to_json(done, service);
}

int report_job(const json& job) {
  if (job["state"] != "done") {
    std::cerr << "job " << job["id"].get<std::string>() << " " << job["state"].get<std::string>() << ": "
              << job["error"].dump() << "\n";
    return 1;
  }
  return 0;
}

std::atomic<mixel::HttpApi*> g_api{nullptr};

void handle_signal(int) {
  if (auto* api = g_api.load()) {
    api->stop();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic pixel pattern design and virtual plotter"};
  app.require_subcommand(1);

  std::string out;
  std::size_t order = 8;
  std::uint64_t seed = 0;
  std::string device = "plotter0";
  std::string server;
  double sigma = 0.18;
  std::size_t sheet_rows = 32;
  std::size_t sheet_cols = 32;

  auto add_device_flags = [&](CLI::App* sub) {
    sub->add_option("--device", device, "Device id")->capture_default_str();
    sub->add_option("--server", server, "Control service URL, e.g. http://127.0.0.1:8080");
    sub->add_option("--sigma", sigma, "Hall sensor noise (in-process device)")->capture_default_str();
    sub->add_option("--seed", seed, "Sensor RNG seed (in-process device)")->capture_default_str();
  };

  auto* hadamard = app.add_subcommand("hadamard", "Write a Sylvester Hadamard pattern");
  hadamard->add_option("--order", order, "Power of two")->capture_default_str();
  hadamard->add_option("--out", out, "Output .mixel.json (stdout if omitted)");

  mixel::PairSetRequest pair_req;
  std::string pair_mode = "attract";
  auto* pairs = app.add_subcommand("pairs", "Design mutually agnostic key/lock pairs");
  pairs->add_option("-k,--pairs", pair_req.k, "Number of pairs")->capture_default_str();
  pairs->add_option("--order", pair_req.order, "Pattern order")->capture_default_str();
  pairs->add_option("--candidates", pair_req.candidates, "Permutations sampled")->capture_default_str();
  pairs->add_option("--mode", pair_mode, "attract | repel")->capture_default_str();
  pairs->add_option("--seed", pair_req.seed, "Sampling seed")->capture_default_str();
  pairs->add_option("--out", out, "Output JSON");

  std::string file_a;
  std::string file_b;
  std::string normalization = "overlap";
  auto* predict = app.add_subcommand("predict", "Interaction map between two patterns");
  predict->add_option("a", file_a, "First pattern")->required();
  predict->add_option("b", file_b, "Second pattern")->required();
  predict->add_option("--normalization", normalization, "overlap | full")->capture_default_str();
  predict->add_option("--out", out, "Output JSON");

  std::string pattern_path;
  std::string base_path;
  bool streams = false;
  auto* compile = app.add_subcommand("compile", "Compile a pattern to a plotter program");
  compile->add_option("pattern", pattern_path, "Pattern to plot")->required();
  compile->add_option("--base", base_path, "Previously plotted pattern; compile only the delta");
  compile->add_flag("--streams", streams, "Emit motion and device streams separately");
  compile->add_option("--out", out, "Program output (stdout if omitted)");

  auto* plot = app.add_subcommand("plot", "Plot a pattern on a device");
  plot->add_option("pattern", pattern_path, "Pattern to plot")->required();
  plot->add_option("--base", base_path, "Previously plotted pattern; plot only the delta");
  plot->add_option("--out", out, "Write the resulting sheet snapshot here");
  add_device_flags(plot);

  std::size_t scan_rows = 8;
  std::size_t scan_cols = 8;
  auto* scan = app.add_subcommand("scan", "Scan a device and write the classified pattern");
  scan->add_option("--rows", scan_rows)->capture_default_str();
  scan->add_option("--cols", scan_cols)->capture_default_str();
  scan->add_option("--out", out, "Output .mixel.json (stdout if omitted)");
  add_device_flags(scan);

  double peak = 10.0;
  std::size_t steps = 100;
  auto* bh = app.add_subcommand("bh-curve", "Trace a hysteresis loop as CSV");
  bh->add_option("--peak", peak, "Peak current in A")->capture_default_str();
  bh->add_option("--steps", steps, "Samples per half branch")->capture_default_str();
  bh->add_option("--out", out, "CSV output (stdout if omitted)");

  auto* roundtrip = app.add_subcommand("roundtrip", "Plot a Hadamard pattern, scan it back and compare");
  roundtrip->add_option("--order", order)->capture_default_str();
  roundtrip->add_option("--sigma", sigma)->capture_default_str();
  roundtrip->add_option("--seed", seed)->capture_default_str();
  roundtrip->add_option("--device", device)->capture_default_str();

  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t device_count = 1;
  long line_delay_us = 0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP control service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--devices", device_count, "Virtual plotters plotter0..N-1")->capture_default_str();
  serve->add_option("--rows", sheet_rows, "Sheet rows per device")->capture_default_str();
  serve->add_option("--cols", sheet_cols, "Sheet columns per device")->capture_default_str();
  serve->add_option("--sigma", sigma)->capture_default_str();
  serve->add_option("--seed", seed)->capture_default_str();
  serve->add_option("--line-delay-us", line_delay_us, "Delay after each protocol line")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hadamard) {
      write_output(out, mixel::save_pattern(mixel::sylvester_hadamard(order), {{"name", "H" + std::to_string(order)}}));
      return 0;
    }
    if (*pairs) {
      pair_req.mode = mixel::pair_mode_from_string(pair_mode);
      const auto set = mixel::generate_pair_set(pair_req);
      write_output(out, mixel::wire::pair_set_to_json(set).dump(2) + "\n");
      std::cerr << "worst off-target |ncc| = " << set.score << "\n";
      return 0;
    }
    if (*predict) {
      const auto a = mixel::load_pattern_file(file_a).grid;
      const auto b = mixel::load_pattern_file(file_b).grid;
      const auto map = mixel::interaction_map(a, b, mixel::normalization_from_string(normalization));
      write_output(out, mixel::wire::interaction_map_to_json(map).dump(2) + "\n");
      return 0;
    }

    auto load_plot_grid = [&] {
      auto grid = mixel::load_pattern_file(pattern_path).grid;
      if (!base_path.empty()) {
        grid = mixel::diff_delta(mixel::load_pattern_file(base_path).grid, grid);
      }
      return grid;
    };

    if (*compile) {
      const auto path = mixel::compile_plot(load_plot_grid());
      if (streams) {
        const auto s = mixel::emit_program_streams(path);
        write_output(out.empty() ? "" : out + ".motion", s.motion);
        write_output(out.empty() ? "" : out + ".device", s.device);
      } else {
        write_output(out, mixel::emit_program(path));
      }
      const auto est = mixel::estimate_job(path);
      std::cerr << est.pixels_written << " pixels written, " << est.pixels_skipped << " skipped, "
                << est.duration_s << " s, " << est.energy_j << " J\n";
      return 0;
    }
    if (*bh) {
      write_output(out, mixel::loop_to_csv(mixel::trace_hysteresis_loop(mixel::SheetModel{}, peak, steps)));
      return 0;
    }

    if (*plot || *scan) {
      json job;
      if (!server.empty()) {
        if (*plot) {
          job = http_call(server, "POST", "/devices/" + device + "/plot",
                          {{"pattern", mixel::pattern_to_json(load_plot_grid())}});
        } else {
          job = http_call(server, "POST", "/devices/" + device + "/scan", {{"rows", scan_rows}, {"cols", scan_cols}});
        }
        job = poll_remote(server, job);
      } else {
        mixel::ControlService service;
        service.add_device(device, plotter_config(sheet_rows, sheet_cols, sigma, seed));
        job = *plot ? finish_local(service, service.submit_plot(device, load_plot_grid()))
                    : finish_local(service, service.submit_scan(device, scan_rows, scan_cols));
        if (*plot && !out.empty()) {
          mixel::save_pattern_file(out, service.device_sheet(device), {{"device", device}});
        }
      }
      if (*scan && job["state"] == "done") {
        const auto result = mixel::pattern_from_json(job["result"]);
        write_output(out, mixel::save_pattern(result.grid, result.metadata));
      } else if (*plot) {
        std::cout << job.dump(2) << "\n";
      }
      return report_job(job);
    }

    if (*roundtrip) {
      const auto started = std::chrono::steady_clock::now();
      const auto target = mixel::sylvester_hadamard(order);
      mixel::ControlService service;
      service.add_device(device, plotter_config(order, order, sigma, seed));
      const auto plotted = service.wait_for(service.submit_plot(device, target).id, kJobTimeout);
      const auto scanned = service.wait_for(service.submit_scan(device, order, order).id, kJobTimeout);
      if (plotted.state != mixel::JobState::Done || scanned.state != mixel::JobState::Done) {
        std::cerr << "round trip job failed\n";
        return 1;
      }
      std::size_t recovered = 0;
      for (std::size_t r = 0; r < order; ++r) {
        for (std::size_t c = 0; c < order; ++c) {
          recovered += scanned.result->grid(r, c) == target(r, c) ? 1 : 0;
        }
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      std::cout << recovered << "/" << target.size() << " pixels recovered in " << secs << " s\n";
      return recovered == target.size() ? 0 : 1;
    }

    if (*serve) {
      mixel::ServiceConfig cfg;
      cfg.line_delay = std::chrono::microseconds(line_delay_us);
      mixel::ControlService service(cfg);
      for (std::size_t i = 0; i < device_count; ++i) {
        service.add_device("plotter" + std::to_string(i), plotter_config(sheet_rows, sheet_cols, sigma, seed + i));
      }
      mixel::HttpApi api(service);
      g_api = &api;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      const bool ok = api.listen(host, port);
      g_api = nullptr;
      if (!ok) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
