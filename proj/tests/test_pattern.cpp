#include <chrono>
#include <random>

#include "doctest.h"
#include "mixel/errors.hpp"
#include "mixel/pattern.hpp"
#include "mixel/pixel_grid.hpp"
#include "support/oracle.hpp"

using namespace mixel;

TEST_CASE("pixel grid construction and bounds") {
  PixelGrid g(2, 3);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 3);
  CHECK(g.size() == 6);
  CHECK(g.at(1, 2) == 0.0);
  CHECK_THROWS_AS(PixelGrid(0, 3), SizeError);
  CHECK_THROWS_AS(PixelGrid(3, 0), SizeError);
  CHECK_THROWS_AS(g.at(2, 0), RangeError);
  CHECK_THROWS_AS(g.set(0, 0, 1.5), ValidationError);
  CHECK_THROWS_AS(PixelGrid(1, 2, {0.0}), ShapeError);
  CHECK_THROWS_AS(PixelGrid::from_rows({{1, 1}, {1}}), ShapeError);
}

TEST_CASE("out-of-range value names its cell") {
  try {
    PixelGrid::from_rows({{0, 0}, {0, -1.25}});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.has_cell());
    CHECK(e.row() == 1);
    CHECK(e.col() == 1);
  }
}

TEST_CASE("negative zero is stored as zero") {
  const auto g = PixelGrid::from_rows({{-0.0}});
  CHECK_FALSE(std::signbit(g(0, 0)));
  CHECK(g == PixelGrid(1, 1));
}

TEST_CASE("write mask semantics") {
  auto g = PixelGrid::from_rows({{1, 0}, {0, -1}});
  CHECK_FALSE(g.has_mask());
  CHECK(g.writes(0, 0));
  CHECK_FALSE(g.writes(0, 1));
  CHECK(g.write_count() == 2);

  g.set_mask_cell(0, 1, true);
  REQUIRE(g.has_mask());
  CHECK(g.writes(0, 1));
  CHECK(g.writes(0, 0));  // implied entries survive materialization
  CHECK_FALSE(g.writes(1, 0));
  CHECK(g.write_count() == 3);

  g.clear_mask();
  CHECK(g.write_count() == 2);
  CHECK_THROWS_AS(g.set_mask({1, 0}), ShapeError);
}

TEST_CASE("sylvester hadamard matches the popcount formula") {
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u}) {
    const auto h = sylvester_hadamard(n);
    REQUIRE(h.rows() == n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(h(i, j) == oracle::hadamard_entry(i, j));
      }
    }
    CHECK(orthogonality_defect(h) == 0.0);
  }
}

TEST_CASE("H2 and H4 literal values") {
  CHECK(sylvester_hadamard(2) == PixelGrid::from_rows({{1, 1}, {1, -1}}));
  CHECK(sylvester_hadamard(4) ==
        PixelGrid::from_rows({{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}}));
}

TEST_CASE("hadamard order errors") {
  CHECK_THROWS_AS(sylvester_hadamard(0), SizeError);
  CHECK_THROWS_AS(sylvester_hadamard(3), SizeError);
  CHECK_THROWS_AS(sylvester_hadamard(12), SizeError);
}

TEST_CASE("H64 builds quickly") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto h = sylvester_hadamard(64);
  const auto dt = std::chrono::steady_clock::now() - t0;
  CHECK(h.rows() == 64);
  CHECK(dt < std::chrono::seconds(1));
}

TEST_CASE("complement negates and keeps the mask") {
  auto g = PixelGrid::from_rows({{1, 0}, {-1, 0.5}});
  g.set_mask_cell(0, 1, true);
  const auto c = complement(g);
  CHECK(c(0, 0) == -1.0);
  CHECK(c(1, 0) == 1.0);
  CHECK(c(1, 1) == -0.5);
  CHECK(c(0, 1) == 0.0);
  CHECK(c.mask() == g.mask());
  CHECK(complement(c) == g);
}

TEST_CASE("permute_rows moves rows and preserves orthogonality") {
  const auto h = sylvester_hadamard(8);
  const Permutation perm{3, 1, 7, 0, 2, 6, 5, 4};
  const auto p = permute_rows(h, perm);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(p.row_values(i) == h.row_values(perm[i]));
  }
  CHECK(orthogonality_defect(p) == 0.0);
  CHECK_THROWS_AS(permute_rows(h, Permutation{0, 1, 2}), PermutationError);
  CHECK_THROWS_AS(permute_rows(h, Permutation{0, 0, 1, 2, 3, 4, 5, 6}), PermutationError);
}

TEST_CASE("checkerboard and orthogonality defect") {
  const auto cb = checkerboard(3, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(cb(i, j) == ((i + j) % 2 == 0 ? 1.0 : -1.0));
    }
  }
  // Every row of a checkerboard is +-(row 0): defect 1.
  CHECK(orthogonality_defect(checkerboard(4, 4)) == 1.0);
  CHECK_THROWS_AS(orthogonality_defect(checkerboard(3, 4)), DomainError);
  CHECK_THROWS_AS(orthogonality_defect(PixelGrid(2, 2)), DomainError);
}

TEST_CASE("permutation helpers") {
  CHECK(is_permutation(identity_permutation(5)));
  CHECK_FALSE(is_permutation(Permutation{0, 2}));
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(64));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(6));
}
