#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mixel/errors.hpp"
#include "mixel/pattern.hpp"
#include "mixel/pattern_io.hpp"
#include "mixel/toolpath.hpp"

using namespace mixel;

namespace {

template <typename T>
std::size_t count_of(const Toolpath& path) {
  return static_cast<std::size_t>(
      std::count_if(path.commands.begin(), path.commands.end(), [](const auto& c) { return std::holds_alternative<T>(c); }));
}

std::vector<Energize> energizes(const Toolpath& path) {
  std::vector<Energize> out;
  for (const auto& c : path.commands) {
    if (const auto* e = std::get_if<Energize>(&c)) {
      out.push_back(*e);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("serpentine order") {
  const auto order = serpentine_order(3, 3);
  const std::vector<Cell> expect{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {1, 1}, {1, 0}, {2, 0}, {2, 1}, {2, 2}};
  CHECK(order == expect);
}

TEST_CASE("H2 plot command sequence") {
  const auto path = compile_plot(sylvester_hadamard(2));
  REQUIRE(path.commands.size() == 21);
  CHECK(path.commands[0] == MachineCommand{MoveTo{0, 0, 3, 1200}});
  CHECK(path.commands[1] == MachineCommand{MoveTo{0, 0, 0, 1200}});
  CHECK(path.commands[2] == MachineCommand{Energize{Polarity::North, 10.0, 0.7}});
  CHECK(path.commands[3] == MachineCommand{MagnetOff{}});
  CHECK(path.commands[4] == MachineCommand{MoveTo{0, 0, 3, 1200}});
  CHECK(path.commands[5] == MachineCommand{MoveTo{3, 0, 3, 1200}});
  // Row 1 runs right to left: (1,1) is -1 and comes first.
  CHECK(path.commands[12] == MachineCommand{Energize{Polarity::South, 10.0, 0.7}});
  CHECK(path.commands.back() == MachineCommand{Home{}});
  CHECK(toolpath_violations(path).empty());
}

TEST_CASE("unwritten cells produce no commands") {
  const auto path = compile_plot(PixelGrid(4, 4));
  CHECK(count_of<Energize>(path) == 0);
  CHECK(path.commands.size() == 1);
  const auto est = estimate_job(path);
  CHECK(est.duration_s == 0.0);
  CHECK(est.pixels_skipped == 16);
}

TEST_CASE("masked zero compiles to a coercive demagnetizing pulse") {
  auto g = PixelGrid(1, 3);
  g.set_mask_cell(0, 1, true);
  const auto path = compile_plot(g);
  const auto e = energizes(path);
  REQUIRE(e.size() == 1);
  CHECK(e[0].current == SheetModel{}.i_coercive);
}

TEST_CASE("partial values use quantized currents that avoid the coercive value") {
  const SheetModel sheet;
  const auto g = PixelGrid::from_rows({{0.5, -0.25, reach(sheet, 1.2)}});
  for (const auto& e : energizes(compile_plot(g))) {
    const double centi = e.current * 100.0;
    CHECK(std::abs(centi - std::round(centi)) < 1e-9);
    CHECK(e.current != sheet.i_coercive);
  }
  const auto e = energizes(compile_plot(g));
  CHECK(program_pixel(sheet, {}, e[0].current).m == doctest::Approx(0.5).epsilon(0.01));
  CHECK(e[1].polarity == Polarity::South);
}

TEST_CASE("scan visits every cell once with a hall read") {
  const auto path = compile_scan(3, 4);
  CHECK(count_of<HallRead>(path) == 12);
  CHECK(count_of<Energize>(path) == 0);
  CHECK(toolpath_violations(path).empty());
  const auto est = estimate_job(path);
  CHECK(est.pixels_read == 12);
  CHECK(est.energize_s == 0.0);
  CHECK_THROWS_AS(compile_scan(0, 4), SizeError);
}

TEST_CASE("delta plot of four changed cells") {
  const auto old_grid = sylvester_hadamard(8);
  auto new_grid = old_grid;
  for (auto [r, c] : {std::pair{0, 0}, {2, 5}, {7, 7}, {4, 1}}) {
    new_grid.set(r, c, -old_grid(r, c));
  }
  const auto path = compile_plot(diff_delta(old_grid, new_grid));
  CHECK(count_of<Energize>(path) == 4);
  const auto est = estimate_job(path);
  CHECK(est.energize_s == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(est.pulse_energy_j == doctest::Approx(364.0).epsilon(1e-12));
  CHECK(est.pixels_written == 4);
  CHECK(est.pixels_skipped == 60);
  CHECK(est.energy_j == doctest::Approx(364.0 + 0.2 * est.travel_s));
}

TEST_CASE("estimate travel time from home") {
  Toolpath path;
  path.commands = {MoveTo{30, 40, 0, 600}, Home{}};
  const auto est = estimate_job(path);
  // 50 mm out and 50 mm back at 600 mm/min.
  CHECK(est.travel_s == doctest::Approx(10.0));
  CHECK(est.duration_s == doctest::Approx(10.0));
  CHECK(est.energy_j == doctest::Approx(2.0));
  path.commands = {MoveTo{1, 0, 0, 0}};
  CHECK_THROWS_AS(estimate_job(path), DomainError);
}

TEST_CASE("violations are reported") {
  Toolpath path;
  path.commands = {MoveTo{0, 0, 3, 1200}, Energize{Polarity::North, 10, 0.7}};
  CHECK_FALSE(toolpath_violations(path).empty());
  path.commands = {MoveTo{0, 0, 0, 1200}, HallRead{{0, 0}}, MoveTo{3, 0, 0, 1200}, HallRead{{0, 1}}};
  CHECK_FALSE(toolpath_violations(path).empty());
}

TEST_CASE("concat appends and keeps invariants") {
  const auto a = compile_plot(sylvester_hadamard(2));
  const auto b = compile_plot(complement(sylvester_hadamard(2)));
  const auto both = concat(a, b);
  CHECK(both.commands.size() == a.commands.size() + b.commands.size());
  CHECK(both.cell_count == 8);
  CHECK(toolpath_violations(both).empty());
}

TEST_CASE("program text format") {
  Toolpath path;
  path.commands = {MoveTo{3, -0.0001, 3, 1200.5}, Energize{Polarity::South, 2.5, 0.7}, MagnetOff{}, HallRead{{2, 11}},
                   Home{}};
  CHECK(emit_program(path) ==
        "G0 X3.00 Y0.00 Z3.00 F1200.5\n"
        "MAG S 2.50\n"
        "DWELL 0.70\n"
        "MAG OFF\n"
        "HALL? 2,11\n"
        "HOME\n");
  const auto streams = emit_program_streams(path);
  CHECK(streams.motion == "G0 X3.00 Y0.00 Z3.00 F1200.5\nHOME\n");
  CHECK(streams.device == "MAG S 2.50\nDWELL 0.70\nMAG OFF\nHALL? 2,11\n");
}

TEST_CASE("emit and parse round trip") {
  const auto path = compile_plot(PixelGrid::from_rows({{1, -0.5, 0}, {0.25, -1, 1}}));
  const auto text = emit_program(path);
  CHECK(emit_program(path) == text);
  const auto back = parse_program(text, path);
  CHECK(back.commands == path.commands);
  CHECK(emit_program(back) == text);
}

TEST_CASE("line parser classifies errors") {
  CHECK(parse_program_line("G0 X1 Y2 Z3 F100").line->kind == LineKind::Move);
  CHECK(parse_program_line("MAG N 3.5").line->value == 3.5);
  CHECK(parse_program_line("HALL? 3,4").line->cell == Cell{3, 4});
  CHECK(parse_program_line("FOO").error == LineError::UnknownCommand);
  CHECK(parse_program_line("").error == LineError::UnknownCommand);
  CHECK(parse_program_line("MAG N abc").error == LineError::BadArgument);
  CHECK(parse_program_line("MAG Q 1").error == LineError::BadArgument);
  CHECK(parse_program_line("G0 X1 Yz Z3").error == LineError::BadArgument);
  CHECK(parse_program_line("HALL? 3").error == LineError::BadArgument);
  CHECK(parse_program_line("DWELL -1").error == LineError::BadArgument);
  CHECK_THROWS_AS(parse_program("MAG N 1\nMAG OFF\n"), ParseError);
  try {
    parse_program("HOME\nBOGUS\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
