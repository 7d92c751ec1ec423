#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mixel/magnet_model.hpp"
#include "mixel/pixel_grid.hpp"
#include "mixel/toolpath.hpp"

namespace mixel {

struct HallSensorModel {
  double noise_sigma = 0.18;  // normalized units
  double gain = 1.0;
};

// Simulated magnetic sheet: one PixelState per 3 mm cell.
class VirtualSheet {
 public:
  VirtualSheet(std::size_t rows, std::size_t cols, Point2 origin = {}, double pitch = kPixelPitchMm);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Point2 origin() const noexcept { return origin_; }
  double pitch() const noexcept { return pitch_; }

  // Nearest cell center within `tolerance` mm of (x, y), if any.
  std::optional<Cell> cell_at(double x, double y, double tolerance) const noexcept;

  PixelState state(Cell c) const;
  void set_state(Cell c, PixelState s);
  PixelGrid snapshot() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Point2 origin_;
  double pitch_;
  std::vector<PixelState> cells_;
};

struct MagnetState {
  bool on = false;
  Polarity polarity = Polarity::North;
  double current = 0.0;
};

struct Position3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Which serial port a line arrived on. Merged accepts everything; the split
// ports accept only motion (G0, HOME) or device (MAG, DWELL, HALL?) lines.
enum class Channel { Merged, Motion, Device };

struct PlotterConfig {
  std::size_t rows = 32;
  std::size_t cols = 32;
  Point2 origin;
  SheetModel sheet;
  HallSensorModel sensor;
  std::uint64_t seed = 0;
  double snap_tolerance_mm = 0.5;
};

// Line-protocol device emulator. Replies are exactly one line each:
//   "ok", "H <reading %.3f>", or "err <code> <msg>" with codes
//   1 unknown_command, 2 bad_argument, 3 out_of_range, 4 over_current.
// A session is owned by one caller at a time; it is not internally locked.
class PlotterSession {
 public:
  explicit PlotterSession(PlotterConfig config);

  std::string handle_command(std::string_view line, Channel channel = Channel::Merged);

  // Cell magnetization plus one sensor noise sample. Never mutates the sheet.
  // Throws RangeError for a cell outside the sheet.
  double read_hall(std::size_t row, std::size_t col);

  // Noise-free copy of the sheet.
  PixelGrid snapshot_sheet() const { return sheet_.snapshot(); }

  const VirtualSheet& sheet() const noexcept { return sheet_; }
  const PlotterConfig& config() const noexcept { return config_; }
  Position3 head() const noexcept { return head_; }
  MagnetState magnet() const noexcept { return magnet_; }
  // Simulated seconds spent in dwells.
  double dwell_seconds() const noexcept { return dwell_s_; }
  std::size_t writes_applied() const noexcept { return writes_; }
  // Notable non-error events, e.g. an energize that hit no cell.
  const std::vector<std::string>& events() const noexcept { return events_; }

 private:
  std::string dispatch(const ProgramLine& line);

  PlotterConfig config_;
  VirtualSheet sheet_;
  std::mt19937_64 rng_;
  Position3 head_;
  MagnetState magnet_;
  double dwell_s_ = 0.0;
  std::size_t writes_ = 0;
  std::vector<std::string> events_;
};

}  // namespace mixel
