#include <cmath>
#include <random>

#include "doctest.h"
#include "mixel/errors.hpp"
#include "mixel/interaction.hpp"
#include "mixel/pattern.hpp"
#include "support/oracle.hpp"

using namespace mixel;

TEST_CASE("aligned complements attract perfectly, identical patterns repel") {
  const auto h = sylvester_hadamard(8);
  CHECK(ncc_at(h, complement(h), {0, 0}) == -1.0);
  CHECK(ncc_at(h, h, {0, 0}) == 1.0);
}

TEST_CASE("hadamard is agnostic under pure axis translation") {
  const auto h = sylvester_hadamard(8);
  const auto c = complement(h);
  for (long d = 1; d < 8; ++d) {
    CHECK(ncc_at(h, c, {d, 0}) == 0.0);
    CHECK(ncc_at(h, c, {-d, 0}) == 0.0);
    CHECK(ncc_at(h, c, {0, d}) == 0.0);
    CHECK(ncc_at(h, c, {0, -d}) == 0.0);
  }
}

TEST_CASE("H4 against its complement, diagonal offsets") {
  const auto h = sylvester_hadamard(4);
  const auto c = complement(h);
  const auto a = oracle::to_matrix(h);
  const auto b = oracle::to_matrix(c);
  CHECK(ncc_at(h, c, {1, 1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(ncc_at(h, c, {1, -1}) == doctest::Approx(oracle::ncc_overlap(a, b, 1, -1)).epsilon(1e-15));
  // Single-pixel corner overlap is always a full +-1 under overlap normalization.
  CHECK(std::abs(ncc_at(h, c, {3, 3})) == 1.0);
  CHECK(agnosticism_peak(h, c, true) == 1.0);
  CHECK(agnosticism_peak(h, c, true, Normalization::FullGrid) < 1.0);
}

TEST_CASE("offset convention: b cell (i, j) sits over a cell (i + dy, j + dx)") {
  // a has a single +1 at (2, 3); b has a single +1 at (0, 0).
  PixelGrid a(4, 5);
  a.set(2, 3, 1.0);
  PixelGrid b(2, 2);
  b.set(0, 0, 1.0);
  CHECK(ncc_at(a, b, {3, 2}) == doctest::Approx(0.25));
  CHECK(ncc_at(a, b, {0, 0}) == 0.0);
  CHECK(overlap_count(a, b, {3, 2}) == 4);
  CHECK(overlap_count(a, b, {4, 3}) == 1);
  CHECK(overlap_count(a, b, {5, 0}) == 0);
  CHECK(overlap_count(a, b, {-1, -1}) == 1);
  CHECK(overlap_count(a, b, {-2, 0}) == 0);
}

TEST_CASE("disjoint offsets are range errors") {
  const auto h = sylvester_hadamard(4);
  CHECK_THROWS_AS(ncc_at(h, h, {4, 0}), RangeError);
  CHECK_THROWS_AS(ncc_at(h, h, {0, -4}), RangeError);
}

TEST_CASE("interaction map covers every overlapping offset") {
  std::mt19937_64 rng(11);
  const auto a = oracle::random_grid(rng, 3, 5, true);
  const auto b = oracle::random_grid(rng, 4, 2, true);
  const auto map = interaction_map(a, b);
  CHECK(map.min_dx() == -1);
  CHECK(map.max_dx() == 4);
  CHECK(map.min_dy() == -3);
  CHECK(map.max_dy() == 2);
  CHECK(map.width() == 6);
  CHECK(map.height() == 6);
  const auto ma = oracle::to_matrix(a);
  const auto mb = oracle::to_matrix(b);
  for (long dy = map.min_dy(); dy <= map.max_dy(); ++dy) {
    for (long dx = map.min_dx(); dx <= map.max_dx(); ++dx) {
      const auto ref = oracle::correlate(ma, mb, dx, dy);
      CHECK(map.overlap({dx, dy}) == ref.overlap);
      CHECK(map.ncc({dx, dy}) == doctest::Approx(ref.sum / ref.overlap).epsilon(1e-12));
    }
  }
  CHECK_FALSE(map.contains({5, 0}));
  CHECK_THROWS_AS(map.ncc({5, 0}), RangeError);
}

TEST_CASE("equal n x n grids give a (2n-1) square map") {
  const auto h = sylvester_hadamard(8);
  const auto map = interaction_map(h, complement(h));
  CHECK(map.width() == 15);
  CHECK(map.height() == 15);
  CHECK(map.ncc_values().size() == 225);
}

TEST_CASE("full-grid normalization divides by the smaller area") {
  std::mt19937_64 rng(5);
  const auto a = oracle::random_grid(rng, 6, 6, true);
  const auto b = oracle::random_grid(rng, 3, 4, true);
  const auto ma = oracle::to_matrix(a);
  const auto mb = oracle::to_matrix(b);
  for (long dy = -2; dy <= 5; ++dy) {
    for (long dx = -3; dx <= 5; ++dx) {
      CHECK(ncc_at(a, b, {dx, dy}, Normalization::FullGrid) ==
            doctest::Approx(oracle::ncc_full(ma, mb, dx, dy)).epsilon(1e-12));
    }
  }
}

TEST_CASE("classification thresholds") {
  CHECK(classify(-1.0) == Interaction::Attract);
  CHECK(classify(1.0) == Interaction::Repel);
  CHECK(classify(0.0) == Interaction::Agnostic);
  CHECK(classify(0.125) == Interaction::Agnostic);
  CHECK(classify(-0.125) == Interaction::Agnostic);
  CHECK(classify(0.13) == Interaction::Repel);
  CHECK(classify(-0.3, 0.5) == Interaction::Agnostic);
  CHECK_THROWS_AS(classify(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(classify(0.0, -1.0), DomainError);
}

TEST_CASE("force estimate") {
  const auto f = force_estimate(-1.0, 64);
  CHECK(f.newtons == doctest::Approx(-1.09).epsilon(1e-12));
  CHECK(f.pixel_force == doctest::Approx(0.01703125));
  CHECK(force_estimate(0.0, 64).newtons == 0.0);
  CHECK(force_estimate(0.5, 10, 0.1).newtons == doctest::Approx(0.5));
  CHECK_THROWS_AS(force_estimate(0.0, -1), DomainError);
  CHECK_THROWS_AS(force_estimate(1.5, 4), DomainError);
}

TEST_CASE("string conversions") {
  CHECK(normalization_from_string("overlap") == Normalization::Overlap);
  CHECK(normalization_from_string("full") == Normalization::FullGrid);
  CHECK(to_string(Normalization::FullGrid) == "full");
  CHECK(interaction_from_string("agnostic") == Interaction::Agnostic);
  CHECK(to_string(Interaction::Attract) == "attract");
  CHECK_THROWS_AS(normalization_from_string("bogus"), DomainError);
  CHECK_THROWS_AS(interaction_from_string(""), DomainError);
}
