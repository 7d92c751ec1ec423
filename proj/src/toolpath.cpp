#include "mixel/toolpath.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mixel/errors.hpp"
#include "mixel/format.hpp"

namespace mixel {

std::vector<Cell> serpentine_order(std::size_t rows, std::size_t cols) {
  std::vector<Cell> order;
  order.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      order.push_back({r, r % 2 == 0 ? k : cols - 1 - k});
    }
  }
  return order;
}

namespace {

long to_centiamps(double amps) { return std::lround(amps / kCurrentResolutionA); }

// Pulse magnitude for a nonzero target, on the wire's 0.01 A grid. A value
// that lands on the coercive current is moved to whichever neighbour gets
// closer to the target, since the device reads that exact value as a
// demagnetizing pulse.
double quantized_pulse(const SheetModel& sheet, double target) {
  const long full = to_centiamps(sheet.i_program_full);
  long ca = std::clamp(to_centiamps(std::abs(current_for_target(sheet, target))), 1L, full);
  const long coercive = to_centiamps(sheet.i_coercive);
  if (ca == coercive && static_cast<double>(coercive) * kCurrentResolutionA == sheet.i_coercive) {
    const double goal = std::abs(target);
    const double below = std::abs(reach(sheet, static_cast<double>(ca - 1) / 100.0) - goal);
    const double above = std::abs(reach(sheet, static_cast<double>(ca + 1) / 100.0) - goal);
    ca = (below <= above && ca > 1) ? ca - 1 : ca + 1;
  }
  return static_cast<double>(ca) / 100.0;
}

struct PathBuilder {
  Toolpath path;
  double feed;
  std::optional<Point2> last;

  void visit(Cell cell) {
    const auto p = path.cell_position(cell);
    if (last) {
      path.commands.emplace_back(MoveTo{last->x, last->y, path.z_clearance, feed});
    }
    path.commands.emplace_back(MoveTo{p.x, p.y, path.z_clearance, feed});
    path.commands.emplace_back(MoveTo{p.x, p.y, path.z_contact, feed});
    last = p;
  }

  void finish() {
    if (last) {
      path.commands.emplace_back(MoveTo{last->x, last->y, path.z_clearance, feed});
    }
    path.commands.emplace_back(Home{});
  }
};

void check_feed(double feed) {
  if (!(feed > 0.0) || !std::isfinite(feed)) {
    throw DomainError("feed rate must be positive");
  }
}

}  // namespace

Toolpath compile_plot(const PixelGrid& grid, const PlotOptions& options) {
  check_feed(options.feed);
  if (!(options.dwell > 0.0)) {
    throw DomainError("pulse dwell must be positive");
  }
  options.sheet.validate();
  PathBuilder b{{}, options.feed, std::nullopt};
  b.path.kind = ToolpathKind::Plot;
  b.path.origin = options.origin;
  b.path.cell_count = grid.size();
  for (const auto cell : serpentine_order(grid.rows(), grid.cols())) {
    if (!grid.writes(cell.row, cell.col)) {
      continue;
    }
    b.visit(cell);
    const double v = grid(cell.row, cell.col);
    if (v == 0.0) {
      b.path.commands.emplace_back(Energize{Polarity::South, options.sheet.i_coercive, options.dwell});
    } else {
      b.path.commands.emplace_back(
          Energize{v > 0.0 ? Polarity::North : Polarity::South, quantized_pulse(options.sheet, v), options.dwell});
    }
    b.path.commands.emplace_back(MagnetOff{});
  }
  b.finish();
  return b.path;
}

Toolpath compile_scan(std::size_t rows, std::size_t cols, const PlotOptions& options) {
  if (rows == 0 || cols == 0) {
    throw SizeError("scan dimensions must be positive");
  }
  check_feed(options.feed);
  PathBuilder b{{}, options.feed, std::nullopt};
  b.path.kind = ToolpathKind::Scan;
  b.path.origin = options.origin;
  b.path.cell_count = rows * cols;
  for (const auto cell : serpentine_order(rows, cols)) {
    b.visit(cell);
    b.path.commands.emplace_back(HallRead{cell});
  }
  b.finish();
  return b.path;
}

JobEstimate estimate_job(const Toolpath& path, const JobCostModel& cost) {
  JobEstimate est;
  double x = 0.0, y = 0.0, z = 0.0;
  double last_feed = 0.0;
  auto travel = [&](double nx, double ny, double nz, double feed) {
    const double dist = std::sqrt((nx - x) * (nx - x) + (ny - y) * (ny - y) + (nz - z) * (nz - z));
    if (dist > 0.0) {
      est.travel_s += dist / feed * 60.0;
    }
    x = nx;
    y = ny;
    z = nz;
  };
  for (const auto& cmd : path.commands) {
    if (const auto* m = std::get_if<MoveTo>(&cmd)) {
      check_feed(m->feed);
      last_feed = m->feed;
      travel(m->x, m->y, m->z, m->feed);
    } else if (const auto* e = std::get_if<Energize>(&cmd)) {
      est.energize_s += e->dwell;
      ++est.pixels_written;
    } else if (std::holds_alternative<HallRead>(cmd)) {
      ++est.pixels_read;
    } else if (std::holds_alternative<Home>(cmd)) {
      if (x != 0.0 || y != 0.0 || z != 0.0) {
        check_feed(last_feed);
        travel(0.0, 0.0, 0.0, last_feed);
      }
    }
  }
  if (path.kind == ToolpathKind::Plot && path.cell_count >= est.pixels_written) {
    est.pixels_skipped = path.cell_count - est.pixels_written;
  }
  est.duration_s = est.energize_s + est.travel_s;
  est.pulse_energy_j = est.energize_s * cost.pulse_power_w;
  est.energy_j = est.pulse_energy_j + (est.duration_s - est.energize_s) * cost.idle_power_w;
  return est;
}

Toolpath concat(const Toolpath& a, const Toolpath& b) {
  Toolpath out = a;
  out.commands.insert(out.commands.end(), b.commands.begin(), b.commands.end());
  out.cell_count += b.cell_count;
  return out;
}

std::vector<std::string> toolpath_violations(const Toolpath& path) {
  std::vector<std::string> out;
  constexpr double kTol = 1e-9;
  auto at_cell = [&](const MoveTo& m) -> std::optional<Cell> {
    const double cx = (m.x - path.origin.x) / path.pixel_pitch;
    const double cy = (m.y - path.origin.y) / path.pixel_pitch;
    if (cx < -kTol || cy < -kTol || std::abs(cx - std::round(cx)) > 1e-6 || std::abs(cy - std::round(cy)) > 1e-6) {
      return std::nullopt;
    }
    return Cell{static_cast<std::size_t>(std::lround(cy)), static_cast<std::size_t>(std::lround(cx))};
  };

  std::optional<Cell> last_cell;
  bool cleared = true;
  for (std::size_t i = 0; i < path.commands.size(); ++i) {
    const auto& cmd = path.commands[i];
    if (const auto* m = std::get_if<MoveTo>(&cmd)) {
      if (m->z >= path.z_clearance - kTol) {
        cleared = true;
      }
      continue;
    }
    const bool energize = std::holds_alternative<Energize>(cmd);
    const auto* hall = std::get_if<HallRead>(&cmd);
    if (!energize && !hall) {
      continue;
    }
    const std::string where = "command " + std::to_string(i);
    if (energize) {
      const auto& e = std::get<Energize>(cmd);
      if (!(e.dwell > 0.0) || !(e.current > 0.0 && e.current <= 10.0)) {
        out.push_back(where + ": energize current/dwell out of range");
      }
    }
    const MoveTo* prev = i > 0 ? std::get_if<MoveTo>(&path.commands[i - 1]) : nullptr;
    if (!prev || std::abs(prev->z - path.z_contact) > kTol) {
      out.push_back(where + ": not preceded by a contact-height move");
      continue;
    }
    const auto cell = at_cell(*prev);
    if (!cell) {
      out.push_back(where + ": preceding move is not at a cell center");
      continue;
    }
    if (hall && !(hall->cell == *cell)) {
      out.push_back(where + ": hall read tag does not match head cell");
    }
    if (last_cell && !(*last_cell == *cell) && !cleared) {
      out.push_back(where + ": no clearance move since the previous cell");
    }
    last_cell = cell;
    cleared = false;
  }
  return out;
}

namespace {

void emit_command(std::ostream& motion, std::ostream& device, const MachineCommand& cmd) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, MoveTo>) {
          motion << "G0 X" << fixed(c.x, 2) << " Y" << fixed(c.y, 2) << " Z" << fixed(c.z, 2) << " F" << shortest(c.feed)
                 << '\n';
        } else if constexpr (std::is_same_v<T, Energize>) {
          device << "MAG " << polarity_letter(c.polarity) << ' ' << fixed(c.current, 2) << '\n'
                 << "DWELL " << fixed(c.dwell, 2) << '\n';
        } else if constexpr (std::is_same_v<T, MagnetOff>) {
          device << "MAG OFF\n";
        } else if constexpr (std::is_same_v<T, HallRead>) {
          device << "HALL? " << c.cell.row << ',' << c.cell.col << '\n';
        } else {
          motion << "HOME\n";
        }
      },
      cmd);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  if (s.empty()) return std::nullopt;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

LineParse bad() { return {std::nullopt, LineError::BadArgument}; }

}  // namespace

std::string emit_program(const Toolpath& path) {
  std::ostringstream os;
  for (const auto& cmd : path.commands) {
    emit_command(os, os, cmd);
  }
  return os.str();
}

ProgramStreams emit_program_streams(const Toolpath& path) {
  std::ostringstream motion;
  std::ostringstream device;
  for (const auto& cmd : path.commands) {
    emit_command(motion, device, cmd);
  }
  return {motion.str(), device.str()};
}

LineParse parse_program_line(std::string_view text) {
  const auto tokens = split_ws(trim(text));
  if (tokens.empty()) {
    return {std::nullopt, LineError::UnknownCommand};
  }
  ProgramLine line;
  const auto head = tokens[0];
  if (head == "G0") {
    line.kind = LineKind::Move;
    bool has_x = false, has_y = false, has_z = false;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto tok = tokens[i];
      const auto v = parse_number<double>(tok.substr(1));
      if (!v) return bad();
      switch (tok[0]) {
        case 'X': line.move.x = *v; has_x = true; break;
        case 'Y': line.move.y = *v; has_y = true; break;
        case 'Z': line.move.z = *v; has_z = true; break;
        case 'F':
          if (!(*v > 0.0)) return bad();
          line.move.feed = *v;
          break;
        default: return bad();
      }
    }
    if (!has_x || !has_y || !has_z) return bad();
    return {line, LineError::None};
  }
  if (head == "MAG") {
    if (tokens.size() == 2 && tokens[1] == "OFF") {
      line.kind = LineKind::MagnetOff;
      return {line, LineError::None};
    }
    if (tokens.size() != 3 || (tokens[1] != "N" && tokens[1] != "S")) return bad();
    const auto amps = parse_number<double>(tokens[2]);
    if (!amps || *amps < 0.0) return bad();
    line.kind = LineKind::MagnetOn;
    line.polarity = tokens[1] == "N" ? Polarity::North : Polarity::South;
    line.value = *amps;
    return {line, LineError::None};
  }
  if (head == "DWELL") {
    if (tokens.size() != 2) return bad();
    const auto secs = parse_number<double>(tokens[1]);
    if (!secs || *secs < 0.0) return bad();
    line.kind = LineKind::Dwell;
    line.value = *secs;
    return {line, LineError::None};
  }
  if (head == "HALL?") {
    if (tokens.size() != 2) return bad();
    const auto comma = tokens[1].find(',');
    if (comma == std::string_view::npos) return bad();
    const auto r = parse_number<std::size_t>(tokens[1].substr(0, comma));
    const auto c = parse_number<std::size_t>(tokens[1].substr(comma + 1));
    if (!r || !c) return bad();
    line.kind = LineKind::Hall;
    line.cell = {*r, *c};
    return {line, LineError::None};
  }
  if (head == "HOME") {
    if (tokens.size() != 1) return bad();
    line.kind = LineKind::Home;
    return {line, LineError::None};
  }
  return {std::nullopt, LineError::UnknownCommand};
}

Toolpath parse_program(std::string_view text, const Toolpath& geometry) {
  Toolpath path;
  path.kind = geometry.kind;
  path.pixel_pitch = geometry.pixel_pitch;
  path.z_clearance = geometry.z_clearance;
  path.z_contact = geometry.z_contact;
  path.origin = geometry.origin;
  path.cell_count = geometry.cell_count;

  bool pending = false;
  Energize pending_mag;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (trim(raw).empty()) continue;
    const auto parsed = parse_program_line(raw);
    if (!parsed.line) {
      throw ParseError(parsed.error == LineError::UnknownCommand ? "unknown command" : "bad argument", line_no, 1);
    }
    const auto& l = *parsed.line;
    if (pending && l.kind != LineKind::Dwell) {
      throw ParseError("MAG without DWELL", line_no, 1);
    }
    switch (l.kind) {
      case LineKind::Move:
        path.commands.emplace_back(l.move);
        break;
      case LineKind::MagnetOn:
        pending = true;
        pending_mag = Energize{l.polarity, l.value, 0.0};
        break;
      case LineKind::Dwell:
        if (!pending) throw ParseError("DWELL without MAG", line_no, 1);
        pending_mag.dwell = l.value;
        path.commands.emplace_back(pending_mag);
        pending = false;
        break;
      case LineKind::MagnetOff:
        path.commands.emplace_back(MagnetOff{});
        break;
      case LineKind::Hall:
        path.commands.emplace_back(HallRead{l.cell});
        break;
      case LineKind::Home:
        path.commands.emplace_back(Home{});
        break;
    }
  }
  if (pending) {
    throw ParseError("MAG without DWELL", line_no, 1);
  }
  return path;
}

}  // namespace mixel
