#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mixel/errors.hpp"
#include "mixel/magnet_model.hpp"

using namespace mixel;

TEST_CASE("electromagnet field curve") {
  const ElectromagnetModel em;
  CHECK(emag_field(em, 0.0) == 0.0);
  CHECK(emag_field(em, 10.0) == doctest::Approx(0.302 * std::tanh(3.0)));
  CHECK(std::abs(emag_field(em, 10.0)) >= 0.296);
  CHECK(std::abs(emag_field(em, -10.0)) <= 0.308);
  double prev = -1.0;
  for (int k = -150; k <= 150; ++k) {
    const double i = k * 0.1;
    const double b = emag_field(em, i);
    CHECK(b > prev);
    CHECK(emag_field(em, -i) == -b);
    prev = b;
  }
  CHECK_THROWS_AS(emag_field(em, 15.01), RangeError);
  CHECK_THROWS_AS(emag_field(em, -16.0), RangeError);
}

TEST_CASE("sampled field scatters around the curve") {
  const ElectromagnetModel em;
  std::mt19937_64 rng(4);
  double sum = 0.0;
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    sum += sample_emag_field(em, 5.0, rng);
  }
  CHECK(sum / n == doctest::Approx(emag_field(em, 5.0)).epsilon(1e-3));
}

TEST_CASE("reach curve") {
  const SheetModel sheet;
  CHECK(reach(sheet, 0.0) == 0.0);
  CHECK(reach(sheet, 10.0) == 1.0);
  CHECK(reach(sheet, 3.3) == doctest::Approx(std::tanh(1.75 * 0.33) / std::tanh(1.75)));
  CHECK(reach(sheet, 3.3) < reach(sheet, 6.6));
  CHECK_THROWS_AS(reach(sheet, -0.1), RangeError);
  CHECK_THROWS_AS(reach(sheet, 10.5), RangeError);
}

TEST_CASE("program_pixel overwrite semantics") {
  const SheetModel sheet;
  const PixelState south{-1.0};
  const PixelState north{1.0};
  CHECK(program_pixel(sheet, {}, 10.0).m == 1.0);
  CHECK(program_pixel(sheet, {}, -10.0).m == -1.0);
  CHECK(flux_tesla(sheet, program_pixel(sheet, {}, 10.0)) == doctest::Approx(0.0344));
  CHECK(program_pixel(sheet, south, 10.0).m == 1.0);
  CHECK(program_pixel(sheet, north, 3.3).m == doctest::Approx(reach(sheet, 3.3)));
  CHECK(program_pixel(sheet, south, 3.3).m == doctest::Approx(reach(sheet, 3.3)));
  CHECK(program_pixel(sheet, PixelState{0.4}, 0.0).m == 0.4);
  CHECK_THROWS_AS(program_pixel(sheet, {}, 10.01), RangeError);
}

TEST_CASE("a coercive pulse demagnetizes") {
  const SheetModel sheet;
  CHECK(program_pixel(sheet, {1.0}, -1.2).m == 0.0);
  CHECK(program_pixel(sheet, {-1.0}, 1.2).m == 0.0);
  CHECK(program_pixel(sheet, {0.3}, 1.2).m == 0.0);
  CHECK(program_pixel(sheet, {1.0}, std::nextafter(1.2, 2.0)).m > 0.0);
}

TEST_CASE("current_for_target inverts reach") {
  const SheetModel sheet;
  for (double m : {-1.0, -0.7, -0.2, 0.05, 0.5, 0.99, 1.0}) {
    const double i = current_for_target(sheet, m);
    CHECK(std::signbit(i) == std::signbit(m));
    for (double start : {-1.0, 0.0, 0.6}) {
      CHECK(program_pixel(sheet, {start}, i).m == doctest::Approx(m).epsilon(1e-6));
    }
  }
  CHECK(current_for_target(sheet, 0.0) == 0.0);
  CHECK_THROWS_AS(current_for_target(sheet, 1.01), DomainError);
}

TEST_CASE("sheet model validation") {
  SheetModel bad;
  bad.i_coercive = 12.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.b_sat = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_NOTHROW(SheetModel{}.validate());
}

TEST_CASE("major loop shape") {
  const SheetModel sheet;
  CHECK(loop_initial(sheet, 0.0) == 0.0);
  CHECK(loop_initial(sheet, 10.0) == doctest::Approx(1.0));
  CHECK(loop_descending(sheet, 10.0, 10.0) == doctest::Approx(1.0));
  CHECK(loop_descending(sheet, 10.0, 0.0) >= 0.99);
  CHECK(loop_descending(sheet, 10.0, -10.0) == doctest::Approx(-1.0));
  CHECK(loop_coercive_current(sheet, 10.0) == doctest::Approx(-1.2).epsilon(1e-9));
  CHECK(loop_descending(sheet, 10.0, -1.2) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(loop_ascending(sheet, 10.0, 1.2) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("minor loops nest strictly inside larger ones") {
  const SheetModel sheet;
  for (double small : {3.3, 6.6}) {
    for (int k = -100; k < 100; ++k) {
      const double i = k * small / 100.0;
      if (i <= -small || i >= small) continue;
      CHECK(loop_descending(sheet, small, i) < loop_descending(sheet, 10.0, i));
      CHECK(loop_ascending(sheet, small, i) > loop_ascending(sheet, 10.0, i));
    }
  }
}

TEST_CASE("trace_hysteresis_loop closes and is anti-clockwise") {
  const SheetModel sheet;
  const auto loop = trace_hysteresis_loop(sheet, 10.0, 50);
  REQUIRE(loop.size() == 51 + 101 + 101);
  CHECK(loop.front().amps == 0.0);
  CHECK(loop.front().flux == 0.0);
  CHECK(loop[50].amps == 10.0);
  CHECK(loop[50].flux == doctest::Approx(0.0344));
  CHECK(loop[51].branch == LoopBranch::Descending);
  CHECK(loop[51].flux == loop[50].flux);
  CHECK(loop[151].amps == -10.0);
  CHECK(loop[152].branch == LoopBranch::Ascending);
  CHECK(loop[152].flux == loop[151].flux);
  CHECK(loop.back().amps == 10.0);
  CHECK(loop.back().flux == loop[50].flux);
  CHECK_THROWS_AS(trace_hysteresis_loop(sheet, 0.0, 50), DomainError);
  CHECK_THROWS_AS(trace_hysteresis_loop(sheet, 5.0, 4), DomainError);
  CHECK_THROWS_AS(trace_hysteresis_loop(sheet, 11.0, 50), RangeError);
}

TEST_CASE("loop CSV export") {
  const auto csv = loop_to_csv(trace_hysteresis_loop(SheetModel{}, 5.0, 8));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "current_amps,flux_tesla,branch_label");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
  }
  CHECK(rows == 9 + 17 + 17);
}
