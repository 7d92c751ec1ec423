#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "mixel/pattern_io.hpp"
#include "mixel/pixel_grid.hpp"
#include "mixel/toolpath.hpp"
#include "mixel/virtual_plotter.hpp"

namespace mixel {

enum class JobKind { Plot, Scan };
enum class JobState { Queued, Running, Done, Failed };

std::string_view to_string(JobKind k) noexcept;
std::string_view to_string(JobState s) noexcept;

using Clock = std::chrono::steady_clock;

struct PlotReport {
  std::size_t pixels_written = 0;
  std::size_t pixels_skipped = 0;
  std::size_t commands_sent = 0;
  JobEstimate estimate;
};

struct Job {
  std::string id;
  JobKind kind = JobKind::Plot;
  JobState state = JobState::Queued;
  std::string device;
  std::size_t progress = 0;  // Energize commands (plot) or reads (scan) completed
  std::size_t total = 0;
  Clock::time_point created;
  std::optional<Clock::time_point> started;
  std::optional<Clock::time_point> finished;
  std::optional<std::string> error;
  std::optional<PlotReport> report;  // plot
  std::optional<PatternFile> result;  // scan
};

// One protocol exchange on a device, tagged with the job that issued it.
struct DeviceLogEntry {
  std::string job_id;
  std::string command;
  std::string response;
};

inline constexpr double kScanClassifyThreshold = 0.5;

// Scan reading to pixel value: +1 above the threshold, -1 below its
// negation, 0 in between.
double classify_reading(double reading, double threshold = kScanClassifyThreshold) noexcept;

struct ServiceConfig {
  // Finished jobs are dropped this long after completion.
  std::chrono::milliseconds job_ttl{std::chrono::hours(1)};
  // Artificial delay after every protocol line; lets tests observe progress.
  std::chrono::microseconds line_delay{0};
};

// Owns the device sessions and the job table. Each device runs its jobs one
// at a time on a dedicated worker thread, in submission order; design calls
// never touch device state. All public members are thread-safe.
class ControlService {
 public:
  explicit ControlService(ServiceConfig config = {});
  ~ControlService();

  ControlService(const ControlService&) = delete;
  ControlService& operator=(const ControlService&) = delete;

  // Throws ConfigError for a duplicate or empty id.
  void add_device(const std::string& id, const PlotterConfig& config);
  std::vector<std::string> device_ids() const;
  bool has_device(std::string_view id) const;

  // Throws NotFoundError for an unknown device and RangeError when the grid
  // does not fit on the sheet. Returns the queued job.
  Job submit_plot(const std::string& device, const PixelGrid& grid, const PlotOptions& options = {});

  // Throws ValidationError for a zero dimension, RangeError when the area
  // exceeds the sheet, NotFoundError for an unknown device.
  Job submit_scan(const std::string& device, std::size_t rows, std::size_t cols);

  // Throws NotFoundError for an unknown or expired id.
  Job job_status(const std::string& id);

  // Blocks until the job is terminal or the timeout passes; returns the
  // latest snapshot either way. Throws NotFoundError for an unknown id.
  Job wait_for(const std::string& id, std::chrono::milliseconds timeout);

  // Noise-free sheet state of a device. Throws NotFoundError.
  PixelGrid device_sheet(const std::string& device) const;
  std::vector<DeviceLogEntry> device_log(const std::string& device) const;

  // Removes finished jobs older than the TTL; returns how many went.
  std::size_t purge_expired();

  // Steady clock instant expressed as Unix epoch milliseconds.
  std::int64_t epoch_ms(Clock::time_point t) const noexcept;

 private:
  struct Device;
  struct Work;

  Device& device(std::string_view id) const;
  Job enqueue(Device& dev, Job job, Work work);
  void run_worker(Device& dev, std::stop_token stop);
  void execute(Device& dev, const Work& work);
  void update(const std::string& job_id, const std::function<void(Job&)>& fn);
  std::string send(Device& dev, const std::string& job_id, const std::string& line);

  ServiceConfig config_;
  Clock::time_point steady_origin_;
  std::chrono::system_clock::time_point system_origin_;

  mutable std::mutex devices_mu_;
  std::map<std::string, std::unique_ptr<Device>, std::less<>> devices_;

  mutable std::mutex jobs_mu_;
  std::condition_variable jobs_cv_;
  std::map<std::string, Job> jobs_;
  std::uint64_t next_job_ = 1;
};

}  // namespace mixel
