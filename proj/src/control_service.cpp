#include "mixel/control_service.hpp"

#include <charconv>
#include <cstdio>
#include <deque>
#include <sstream>
#include <thread>

#include "mixel/errors.hpp"
#include "mixel/format.hpp"

namespace mixel {

std::string_view to_string(JobKind k) noexcept { return k == JobKind::Plot ? "plot" : "scan"; }

std::string_view to_string(JobState s) noexcept {
  switch (s) {
    case JobState::Queued:
      return "queued";
    case JobState::Running:
      return "running";
    case JobState::Done:
      return "done";
    case JobState::Failed:
      return "failed";
  }
  return "unknown";
}

double classify_reading(double reading, double threshold) noexcept {
  if (reading > threshold) {
    return 1.0;
  }
  if (reading < -threshold) {
    return -1.0;
  }
  return 0.0;
}

struct ControlService::Work {
  std::string job_id;
  JobKind kind = JobKind::Plot;
  std::vector<std::string> lines;
  std::size_t rows = 0;  // scan geometry
  std::size_t cols = 0;
};

struct ControlService::Device {
  explicit Device(const PlotterConfig& config) : session(config) {}

  mutable std::mutex mu;
  std::condition_variable_any cv;
  PlotterSession session;
  std::deque<Work> queue;
  std::vector<DeviceLogEntry> log;
  std::jthread worker;
};

namespace {

std::vector<std::string> split_lines(const std::string& program) {
  std::vector<std::string> lines;
  std::istringstream in(program);
  for (std::string line; std::getline(in, line);) {
    lines.push_back(std::move(line));
  }
  return lines;
}

bool is_terminal(JobState s) { return s == JobState::Done || s == JobState::Failed; }

}  // namespace

ControlService::ControlService(ServiceConfig config)
    : config_(config), steady_origin_(Clock::now()), system_origin_(std::chrono::system_clock::now()) {}

ControlService::~ControlService() {
  std::lock_guard lock(devices_mu_);
  for (auto& [id, dev] : devices_) {
    dev->worker.request_stop();
    dev->cv.notify_all();
    if (dev->worker.joinable()) {
      dev->worker.join();
    }
  }
}

void ControlService::add_device(const std::string& id, const PlotterConfig& config) {
  if (id.empty()) {
    throw ConfigError("device id must not be empty");
  }
  std::lock_guard lock(devices_mu_);
  if (devices_.contains(id)) {
    throw ConfigError("device '" + id + "' already exists");
  }
  auto dev = std::make_unique<Device>(config);
  Device& ref = *dev;
  devices_.emplace(id, std::move(dev));
  ref.worker = std::jthread([this, &ref](std::stop_token stop) { run_worker(ref, stop); });
}

std::vector<std::string> ControlService::device_ids() const {
  std::lock_guard lock(devices_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, dev] : devices_) {
    ids.push_back(id);
  }
  return ids;
}

bool ControlService::has_device(std::string_view id) const {
  std::lock_guard lock(devices_mu_);
  return devices_.find(id) != devices_.end();
}

ControlService::Device& ControlService::device(std::string_view id) const {
  std::lock_guard lock(devices_mu_);
  const auto it = devices_.find(id);
  if (it == devices_.end()) {
    throw NotFoundError("unknown device '" + std::string(id) + "'");
  }
  return *it->second;
}

Job ControlService::submit_plot(const std::string& device_id, const PixelGrid& grid, const PlotOptions& options) {
  Device& dev = device(device_id);
  const auto& cfg = dev.session.config();
  if (grid.rows() > cfg.rows || grid.cols() > cfg.cols) {
    throw RangeError("pattern " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                     " exceeds sheet " + std::to_string(cfg.rows) + "x" + std::to_string(cfg.cols));
  }
  PlotOptions opts = options;
  opts.origin = cfg.origin;
  opts.sheet = cfg.sheet;
  const Toolpath path = compile_plot(grid, opts);

  Job job;
  job.kind = JobKind::Plot;
  job.device = device_id;
  job.total = grid.write_count();
  PlotReport report;
  report.pixels_skipped = grid.size() - job.total;
  report.estimate = estimate_job(path);
  job.report = report;

  Work work;
  work.kind = JobKind::Plot;
  work.lines = split_lines(emit_program(path));
  return enqueue(dev, std::move(job), std::move(work));
}

Job ControlService::submit_scan(const std::string& device_id, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ValidationError("scan size must be at least 1x1, got " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  Device& dev = device(device_id);
  const auto& cfg = dev.session.config();
  if (rows > cfg.rows || cols > cfg.cols) {
    throw RangeError("scan " + std::to_string(rows) + "x" + std::to_string(cols) + " exceeds sheet " +
                     std::to_string(cfg.rows) + "x" + std::to_string(cfg.cols));
  }
  PlotOptions opts;
  opts.origin = cfg.origin;
  const Toolpath path = compile_scan(rows, cols, opts);

  Job job;
  job.kind = JobKind::Scan;
  job.device = device_id;
  job.total = rows * cols;

  Work work;
  work.kind = JobKind::Scan;
  work.lines = split_lines(emit_program(path));
  work.rows = rows;
  work.cols = cols;
  return enqueue(dev, std::move(job), std::move(work));
}

Job ControlService::enqueue(Device& dev, Job job, Work work) {
  purge_expired();
  {
    std::lock_guard lock(jobs_mu_);
    char id[32];
    std::snprintf(id, sizeof id, "job-%06llu", static_cast<unsigned long long>(next_job_++));
    job.id = id;
    job.state = JobState::Queued;
    job.created = Clock::now();
    jobs_.emplace(job.id, job);
  }
  work.job_id = job.id;
  {
    std::lock_guard lock(dev.mu);
    dev.queue.push_back(std::move(work));
  }
  dev.cv.notify_all();
  return job;
}

Job ControlService::job_status(const std::string& id) {
  purge_expired();
  std::lock_guard lock(jobs_mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) {
    throw NotFoundError("unknown job '" + id + "'");
  }
  return it->second;
}

Job ControlService::wait_for(const std::string& id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(jobs_mu_);
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) {
      throw NotFoundError("unknown job '" + id + "'");
    }
    if (is_terminal(it->second.state) || jobs_cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      const auto again = jobs_.find(id);
      if (again == jobs_.end()) {
        throw NotFoundError("unknown job '" + id + "'");
      }
      return again->second;
    }
  }
}

PixelGrid ControlService::device_sheet(const std::string& device_id) const {
  Device& dev = device(device_id);
  std::lock_guard lock(dev.mu);
  return dev.session.snapshot_sheet();
}

std::vector<DeviceLogEntry> ControlService::device_log(const std::string& device_id) const {
  Device& dev = device(device_id);
  std::lock_guard lock(dev.mu);
  return dev.log;
}

std::size_t ControlService::purge_expired() {
  const auto now = Clock::now();
  std::lock_guard lock(jobs_mu_);
  return std::erase_if(jobs_, [&](const auto& entry) {
    const Job& job = entry.second;
    return is_terminal(job.state) && job.finished && now - *job.finished > config_.job_ttl;
  });
}

std::int64_t ControlService::epoch_ms(Clock::time_point t) const noexcept {
  const auto since_start = std::chrono::duration_cast<std::chrono::system_clock::duration>(t - steady_origin_);
  return std::chrono::duration_cast<std::chrono::milliseconds>((system_origin_ + since_start).time_since_epoch())
      .count();
}

void ControlService::update(const std::string& job_id, const std::function<void(Job&)>& fn) {
  {
    std::lock_guard lock(jobs_mu_);
    const auto it = jobs_.find(job_id);
    if (it == jobs_.end()) {
      return;
    }
    fn(it->second);
  }
  jobs_cv_.notify_all();
}

std::string ControlService::send(Device& dev, const std::string& job_id, const std::string& line) {
  std::string response;
  {
    std::lock_guard lock(dev.mu);
    response = dev.session.handle_command(line);
    dev.log.push_back({job_id, line, response});
  }
  if (config_.line_delay.count() > 0) {
    std::this_thread::sleep_for(config_.line_delay);
  }
  return response;
}

void ControlService::run_worker(Device& dev, std::stop_token stop) {
  for (;;) {
    Work work;
    {
      std::unique_lock lock(dev.mu);
      if (!dev.cv.wait(lock, stop, [&] { return !dev.queue.empty(); })) {
        break;
      }
      work = std::move(dev.queue.front());
      dev.queue.pop_front();
    }
    execute(dev, work);
  }
  // Jobs left behind at shutdown still reach a terminal state.
  std::deque<Work> abandoned;
  {
    std::lock_guard lock(dev.mu);
    abandoned.swap(dev.queue);
  }
  for (const auto& work : abandoned) {
    update(work.job_id, [](Job& job) {
      job.state = JobState::Failed;
      job.error = "service stopped before the job ran";
      job.finished = Clock::now();
    });
  }
}

void ControlService::execute(Device& dev, const Work& work) {
  update(work.job_id, [](Job& job) {
    job.state = JobState::Running;
    job.started = Clock::now();
  });

  std::vector<double> readings;
  std::size_t sent = 0;
  std::optional<std::string> failure;
  for (const auto& line : work.lines) {
    const std::string response = send(dev, work.job_id, line);
    ++sent;
    if (response.starts_with("err")) {
      failure = "device rejected '" + line + "': " + response;
      break;
    }
    if (work.kind == JobKind::Plot && line.starts_with("MAG ") && line != "MAG OFF") {
      update(work.job_id, [](Job& job) { ++job.progress; });
    } else if (work.kind == JobKind::Scan && line.starts_with("HALL?")) {
      double value = 0.0;
      const auto* first = response.data() + 2;
      const auto* last = response.data() + response.size();
      if (!response.starts_with("H ") || std::from_chars(first, last, value).ptr != last) {
        failure = "unreadable sensor response '" + response + "'";
        break;
      }
      readings.push_back(value);
      update(work.job_id, [](Job& job) { ++job.progress; });
    }
  }

  update(work.job_id, [&](Job& job) {
    job.finished = Clock::now();
    if (failure) {
      job.state = JobState::Failed;
      job.error = *failure;
      return;
    }
    job.state = JobState::Done;
    if (work.kind == JobKind::Plot) {
      job.report->pixels_written = job.progress;
      job.report->commands_sent = sent;
      return;
    }
    // Scan lines visit cells in serpentine order; readings land by cell.
    const auto order = serpentine_order(work.rows, work.cols);
    std::vector<double> values(work.rows * work.cols, 0.0);
    nlohmann::json raw = nlohmann::json::array();
    std::vector<double> by_cell(values.size(), 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t idx = order[k].row * work.cols + order[k].col;
      by_cell[idx] = readings[k];
      values[idx] = classify_reading(readings[k]);
    }
    for (std::size_t r = 0; r < work.rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < work.cols; ++c) {
        row.push_back(by_cell[r * work.cols + c]);
      }
      raw.push_back(std::move(row));
    }
    PatternFile result{PixelGrid(work.rows, work.cols, std::move(values)), {}};
    result.metadata["device"] = job.device;
    result.metadata["job"] = job.id;
    result.metadata["raw_readings"] = raw.dump();
    result.metadata["classify_threshold"] = shortest(kScanClassifyThreshold);
    job.result = std::move(result);
  });
}

}  // namespace mixel
