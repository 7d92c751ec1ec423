#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixel/magnet_model.hpp"
#include "mixel/pixel_grid.hpp"

namespace mixel {

enum class Polarity { North, South };

inline char polarity_letter(Polarity p) noexcept { return p == Polarity::North ? 'N' : 'S'; }

struct MoveTo {
  double x = 0.0;  // mm
  double y = 0.0;
  double z = 0.0;
  double feed = 0.0;  // mm/min

  friend bool operator==(const MoveTo&, const MoveTo&) = default;
};

struct Energize {
  Polarity polarity = Polarity::North;
  double current = 0.0;  // A, in (0, 10]
  double dwell = 0.0;    // s, > 0

  friend bool operator==(const Energize&, const Energize&) = default;
};

struct MagnetOff {
  friend bool operator==(const MagnetOff&, const MagnetOff&) = default;
};

struct HallRead {
  Cell cell;

  friend bool operator==(const HallRead&, const HallRead&) = default;
};

struct Home {
  friend bool operator==(const Home&, const Home&) = default;
};

using MachineCommand = std::variant<MoveTo, Energize, MagnetOff, HallRead, Home>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline constexpr double kPixelPitchMm = 3.0;
inline constexpr double kZClearanceMm = 3.0;
inline constexpr double kZContactMm = 0.0;
inline constexpr double kDefaultFeedMmPerMin = 1200.0;
inline constexpr double kPixelDwellS = 0.7;
inline constexpr double kPulsePowerW = 130.0;
inline constexpr double kIdlePowerW = 0.2;
// Pulse currents travel over the wire with two decimals.
inline constexpr double kCurrentResolutionA = 0.01;

enum class ToolpathKind { Plot, Scan };

struct Toolpath {
  ToolpathKind kind = ToolpathKind::Plot;
  std::vector<MachineCommand> commands;
  double pixel_pitch = kPixelPitchMm;
  double z_clearance = kZClearanceMm;
  double z_contact = kZContactMm;
  Point2 origin;
  std::size_t cell_count = 0;  // cells of the source grid, written or not

  // Machine coordinates of a cell center.
  Point2 cell_position(Cell c) const noexcept {
    return {origin.x + static_cast<double>(c.col) * pixel_pitch, origin.y + static_cast<double>(c.row) * pixel_pitch};
  }
};

struct PlotOptions {
  Point2 origin;
  double feed = kDefaultFeedMmPerMin;
  double dwell = kPixelDwellS;
  SheetModel sheet;
};

// Row-major serpentine traversal (even rows left to right, odd rows right to
// left). Each written cell gets: raise at the previous cell, travel at
// clearance, lower to contact, Energize, MagnetOff. Cells the grid does not
// write are skipped entirely; a masked 0 becomes a coercive demagnetizing
// pulse. Pulse currents are quantized to kCurrentResolutionA. Ends with Home.
Toolpath compile_plot(const PixelGrid& grid, const PlotOptions& options = {});

// One HallRead per cell with the same Z-hop discipline. Throws SizeError for
// a zero dimension.
Toolpath compile_scan(std::size_t rows, std::size_t cols, const PlotOptions& options = {});

// Cells in serpentine visiting order.
std::vector<Cell> serpentine_order(std::size_t rows, std::size_t cols);

struct JobCostModel {
  double idle_power_w = kIdlePowerW;
  double pulse_power_w = kPulsePowerW;
};

struct JobEstimate {
  double duration_s = 0.0;
  double energy_j = 0.0;
  double energize_s = 0.0;      // sum of dwells
  double pulse_energy_j = 0.0;  // dwell time at pulse power
  double travel_s = 0.0;
  std::size_t pixels_written = 0;
  std::size_t pixels_skipped = 0;
  std::size_t pixels_read = 0;
};

// Head starts at machine home (0, 0, 0); moves take straight-line distance
// at their feed and HOME returns at the last feed. Throws DomainError for a
// non-positive feed.
JobEstimate estimate_job(const Toolpath& path, const JobCostModel& cost = {});

// Appends b to a; cell counts add.
Toolpath concat(const Toolpath& a, const Toolpath& b);

// Empty when both structural invariants hold: every Energize/HallRead is
// directly preceded by a contact-height MoveTo at its cell, and a clearance
// MoveTo separates commands addressing different cells.
std::vector<std::string> toolpath_violations(const Toolpath& path);

// One command per line, newline terminated:
//   G0 X3.00 Y0.00 Z3.00 F1200 | MAG N 10.00 + DWELL 0.70 | MAG OFF |
//   HALL? <row>,<col> | HOME
std::string emit_program(const Toolpath& path);

// Two-port variant: motion (G0, HOME) and device (MAG, DWELL, HALL?) lines.
struct ProgramStreams {
  std::string motion;
  std::string device;
};
ProgramStreams emit_program_streams(const Toolpath& path);

// One parsed protocol line.
enum class LineKind { Move, MagnetOn, MagnetOff, Dwell, Hall, Home };

struct ProgramLine {
  LineKind kind = LineKind::Home;
  MoveTo move;
  Polarity polarity = Polarity::North;
  double value = 0.0;  // current for MagnetOn, seconds for Dwell
  Cell cell;
};

enum class LineError { None = 0, UnknownCommand = 1, BadArgument = 2 };

struct LineParse {
  std::optional<ProgramLine> line;
  LineError error = LineError::None;
};

LineParse parse_program_line(std::string_view text);

// Inverse of emit_program given the geometry it was compiled with.
// Throws ParseError naming the line.
Toolpath parse_program(std::string_view text, const Toolpath& geometry = {});

}  // namespace mixel
