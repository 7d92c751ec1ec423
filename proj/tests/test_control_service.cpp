#include <chrono>
#include <thread>

#include "doctest.h"
#include "mixel/control_service.hpp"
#include "mixel/errors.hpp"
#include "mixel/pair_designer.hpp"
#include "mixel/pattern.hpp"
#include "mixel/pattern_io.hpp"

using namespace mixel;
using namespace std::chrono_literals;

namespace {

PlotterConfig sheet(std::size_t n = 16, double sigma = 0.18, std::uint64_t seed = 1) {
  PlotterConfig cfg;
  cfg.rows = n;
  cfg.cols = n;
  cfg.sensor.noise_sigma = sigma;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("plot then scan recovers the pattern") {
  ControlService svc;
  svc.add_device("d0", sheet());
  const auto h = sylvester_hadamard(4);
  const auto plot = svc.wait_for(svc.submit_plot("d0", h).id, 10s);
  REQUIRE(plot.state == JobState::Done);
  CHECK(plot.progress == 16);
  CHECK(plot.total == 16);
  REQUIRE(plot.report);
  CHECK(plot.report->pixels_written == 16);
  CHECK(plot.report->estimate.energize_s == doctest::Approx(16 * 0.7));

  const auto scan = svc.wait_for(svc.submit_scan("d0", 4, 4).id, 10s);
  REQUIRE(scan.state == JobState::Done);
  REQUIRE(scan.result);
  CHECK(scan.result->grid == h);
  const auto raw = nlohmann::json::parse(scan.result->metadata.at("raw_readings"));
  CHECK(raw.size() == 4);
  CHECK(raw[0].size() == 4);
}

TEST_CASE("H8 plot writes 64 pixels, zero delta writes none") {
  ControlService svc;
  svc.add_device("d0", sheet());
  const auto h = sylvester_hadamard(8);
  const auto full = svc.wait_for(svc.submit_plot("d0", h).id, 10s);
  CHECK(full.report->pixels_written == 64);
  const auto none = svc.wait_for(svc.submit_plot("d0", diff_delta(h, h)).id, 10s);
  CHECK(none.state == JobState::Done);
  CHECK(none.report->pixels_written == 0);
  CHECK(none.total == 0);
  CHECK(svc.device_sheet("d0").values().size() == 256);
}

TEST_CASE("fresh sheet scans as all zeros") {
  ControlService svc;
  svc.add_device("d0", sheet());
  const auto scan = svc.wait_for(svc.submit_scan("d0", 3, 5).id, 10s);
  CHECK(scan.result->grid == PixelGrid(3, 5));
}

TEST_CASE("submission errors") {
  ControlService svc;
  svc.add_device("d0", sheet(4));
  CHECK_THROWS_AS(svc.submit_scan("d0", 0, 0), ValidationError);
  CHECK_THROWS_AS(svc.submit_scan("d0", 5, 1), RangeError);
  CHECK_THROWS_AS(svc.submit_scan("nope", 1, 1), NotFoundError);
  CHECK_THROWS_AS(svc.submit_plot("d0", sylvester_hadamard(8)), RangeError);
  CHECK_THROWS_AS(svc.job_status("job-missing"), NotFoundError);
  CHECK_THROWS_AS(svc.add_device("d0", sheet()), ConfigError);
  CHECK_THROWS_AS(svc.add_device("", sheet()), ConfigError);
}

TEST_CASE("jobs on one device run in order and never interleave") {
  ServiceConfig cfg;
  cfg.line_delay = 200us;
  ControlService svc(cfg);
  svc.add_device("d0", sheet());
  const auto first = svc.submit_plot("d0", sylvester_hadamard(4));
  const auto second = svc.submit_plot("d0", complement(sylvester_hadamard(4)));
  const auto a = svc.wait_for(first.id, 20s);
  const auto b = svc.wait_for(second.id, 20s);
  REQUIRE(a.state == JobState::Done);
  REQUIRE(b.state == JobState::Done);
  CHECK(*b.started >= *a.finished);
  CHECK(extract_block(svc.device_sheet("d0"), 0, 0, 4, 4) == complement(sylvester_hadamard(4)));

  const auto log = svc.device_log("d0");
  std::size_t switches = 0;
  for (std::size_t i = 1; i < log.size(); ++i) {
    switches += log[i].job_id != log[i - 1].job_id ? 1 : 0;
  }
  CHECK(switches == 1);
  CHECK(log.front().job_id == first.id);
  CHECK(log.back().job_id == second.id);
}

TEST_CASE("progress increases between polls of a running job") {
  ServiceConfig cfg;
  cfg.line_delay = 2ms;
  ControlService svc(cfg);
  svc.add_device("d0", sheet());
  const auto job = svc.submit_plot("d0", sylvester_hadamard(8));
  std::size_t first_seen = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto s = svc.job_status(job.id);
    if (s.state == JobState::Running && s.progress > 0) {
      first_seen = s.progress;
      break;
    }
    std::this_thread::sleep_for(1ms);
  }
  REQUIRE(first_seen > 0);
  std::this_thread::sleep_for(60ms);
  const auto later = svc.job_status(job.id);
  CHECK(later.progress > first_seen);
  svc.wait_for(job.id, 30s);
}

TEST_CASE("independent devices and state transitions") {
  ControlService svc;
  svc.add_device("a", sheet(8));
  svc.add_device("b", sheet(8));
  CHECK(svc.device_ids() == std::vector<std::string>{"a", "b"});
  const auto ja = svc.submit_plot("a", sylvester_hadamard(8));
  const auto jb = svc.submit_plot("b", complement(sylvester_hadamard(8)));
  CHECK(ja.state == JobState::Queued);
  CHECK(ja.id != jb.id);
  svc.wait_for(ja.id, 10s);
  svc.wait_for(jb.id, 10s);
  CHECK(svc.device_sheet("a") == sylvester_hadamard(8));
  CHECK(svc.device_sheet("b") == complement(sylvester_hadamard(8)));
}

TEST_CASE("finished jobs expire after the TTL") {
  ServiceConfig cfg;
  cfg.job_ttl = 20ms;
  ControlService svc(cfg);
  svc.add_device("d0", sheet(4));
  const auto job = svc.wait_for(svc.submit_scan("d0", 1, 1).id, 10s);
  CHECK(job.state == JobState::Done);
  CHECK_NOTHROW(svc.job_status(job.id));
  std::this_thread::sleep_for(50ms);
  CHECK(svc.purge_expired() == 1);
  CHECK_THROWS_AS(svc.job_status(job.id), NotFoundError);
}

TEST_CASE("shutdown with queued work returns promptly") {
  std::string id;
  const auto t0 = std::chrono::steady_clock::now();
  {
    ServiceConfig cfg;
    cfg.line_delay = 1ms;
    ControlService svc(cfg);
    svc.add_device("d0", sheet());
    svc.submit_plot("d0", sylvester_hadamard(8));
    id = svc.submit_plot("d0", sylvester_hadamard(8)).id;
  }
  CHECK_FALSE(id.empty());
  CHECK(std::chrono::steady_clock::now() - t0 < 10s);
}

TEST_CASE("every submitted job reaches a terminal state") {
  ControlService svc;
  svc.add_device("a", sheet(8));
  svc.add_device("b", sheet(8));
  std::vector<std::string> ids;
  for (int k = 0; k < 12; ++k) {
    const std::string dev = k % 2 == 0 ? "a" : "b";
    ids.push_back(k % 3 == 0 ? svc.submit_scan(dev, 8, 8).id : svc.submit_plot(dev, checkerboard(8, 8)).id);
  }
  for (const auto& id : ids) {
    const auto job = svc.wait_for(id, 30s);
    CHECK((job.state == JobState::Done || job.state == JobState::Failed));
  }
}

TEST_CASE("scan reading classification") {
  CHECK(classify_reading(0.51) == 1.0);
  CHECK(classify_reading(-0.51) == -1.0);
  CHECK(classify_reading(0.5) == 0.0);
  CHECK(classify_reading(-0.2) == 0.0);
}
