#include "mixel/virtual_plotter.hpp"

#include <cmath>

#include "mixel/errors.hpp"
#include "mixel/format.hpp"

namespace mixel {

VirtualSheet::VirtualSheet(std::size_t rows, std::size_t cols, Point2 origin, double pitch)
    : rows_(rows), cols_(cols), origin_(origin), pitch_(pitch), cells_(rows * cols) {
  if (rows == 0 || cols == 0) {
    throw SizeError("sheet dimensions must be positive");
  }
  if (!(pitch > 0.0)) {
    throw ConfigError("cell pitch must be positive");
  }
}

std::optional<Cell> VirtualSheet::cell_at(double x, double y, double tolerance) const noexcept {
  const double cx = std::round((x - origin_.x) / pitch_);
  const double cy = std::round((y - origin_.y) / pitch_);
  if (cx < 0.0 || cy < 0.0 || cx >= static_cast<double>(cols_) || cy >= static_cast<double>(rows_)) {
    return std::nullopt;
  }
  const double ex = x - (origin_.x + cx * pitch_);
  const double ey = y - (origin_.y + cy * pitch_);
  if (std::hypot(ex, ey) > tolerance) {
    return std::nullopt;
  }
  return Cell{static_cast<std::size_t>(cy), static_cast<std::size_t>(cx)};
}

PixelState VirtualSheet::state(Cell c) const {
  if (c.row >= rows_ || c.col >= cols_) {
    throw RangeError("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") outside sheet");
  }
  return cells_[c.row * cols_ + c.col];
}

void VirtualSheet::set_state(Cell c, PixelState s) {
  if (c.row >= rows_ || c.col >= cols_) {
    throw RangeError("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") outside sheet");
  }
  cells_[c.row * cols_ + c.col] = s;
}

PixelGrid VirtualSheet::snapshot() const {
  std::vector<double> values;
  values.reserve(cells_.size());
  for (const auto& s : cells_) {
    values.push_back(s.m);
  }
  return PixelGrid(rows_, cols_, std::move(values));
}

PlotterSession::PlotterSession(PlotterConfig config)
    : config_(config), sheet_(config.rows, config.cols, config.origin), rng_(config.seed) {
  config_.sheet.validate();
  if (config_.sensor.noise_sigma < 0.0) {
    throw ConfigError("sensor noise sigma must be nonnegative");
  }
}

double PlotterSession::read_hall(std::size_t row, std::size_t col) {
  const auto s = sheet_.state({row, col});
  double reading = config_.sensor.gain * s.m;
  if (config_.sensor.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, config_.sensor.noise_sigma);
    reading += noise(rng_);
  }
  return reading;
}

std::string PlotterSession::handle_command(std::string_view line, Channel channel) {
  const auto parsed = parse_program_line(line);
  if (!parsed.line) {
    return parsed.error == LineError::BadArgument ? "err 2 bad_argument" : "err 1 unknown_command";
  }
  const auto kind = parsed.line->kind;
  const bool motion = kind == LineKind::Move || kind == LineKind::Home;
  if ((channel == Channel::Motion && !motion) || (channel == Channel::Device && motion)) {
    return "err 1 unknown_command";
  }
  try {
    return dispatch(*parsed.line);
  } catch (const RangeError&) {
    return "err 3 out_of_range";
  } catch (const std::exception&) {
    return "err 9 internal";
  }
}

std::string PlotterSession::dispatch(const ProgramLine& line) {
  switch (line.kind) {
    case LineKind::Move:
      head_ = {line.move.x, line.move.y, line.move.z};
      return "ok";
    case LineKind::Home:
      head_ = {};
      return "ok";
    case LineKind::MagnetOn: {
      if (line.value > config_.sheet.i_program_full) {
        return "err 4 over_current";
      }
      magnet_ = {true, line.polarity, line.value};
      const bool contact = std::abs(head_.z - kZContactMm) <= 1e-9;
      const auto cell = sheet_.cell_at(head_.x, head_.y, config_.snap_tolerance_mm);
      if (!contact || !cell) {
        events_.push_back("energize at (" + fixed(head_.x, 2) + ", " + fixed(head_.y, 2) + ", " + fixed(head_.z, 2) +
                          ") affected no cell");
        return "ok";
      }
      const double signed_amps = line.polarity == Polarity::North ? line.value : -line.value;
      sheet_.set_state(*cell, program_pixel(config_.sheet, sheet_.state(*cell), signed_amps));
      ++writes_;
      return "ok";
    }
    case LineKind::MagnetOff:
      magnet_.on = false;
      magnet_.current = 0.0;
      return "ok";
    case LineKind::Dwell:
      dwell_s_ += line.value;
      return "ok";
    case LineKind::Hall:
      return "H " + fixed(read_hall(line.cell.row, line.cell.col), 3);
  }
  return "err 1 unknown_command";
}

}  // namespace mixel
