#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "mixel/interaction.hpp"
#include "mixel/pattern.hpp"
#include "mixel/pixel_grid.hpp"

namespace mixel {

enum class PairMode { Attract, Repel };

std::string_view to_string(PairMode m) noexcept;
PairMode pair_mode_from_string(std::string_view s);

struct SurfacePair {
  PixelGrid key;
  PixelGrid lock;  // complement(key) when attracting, key itself when repelling
  Permutation rows;  // row permutation of the Sylvester matrix that produced key
};

struct PairSetRequest {
  std::size_t k = 1;
  std::size_t order = 8;
  std::size_t candidates = 64;
  PairMode mode = PairMode::Attract;
  std::uint64_t seed = 0;
};

struct PairSet {
  std::vector<SurfacePair> pairs;
  // Worst off-target |ncc|: within-pair misalignments and every cross-pair
  // offset, whole-grid normalized.
  double score = 0.0;
  // Mean of the per-comparison peaks that make up score.
  double mean_score = 0.0;
  std::uint64_t seed = 0;
  PairMode mode = PairMode::Attract;
};

// Off-target comparisons are scored with whole-grid normalization: the
// overlap-normalized ncc of a single corner pixel is always +-1 and says
// nothing about the net force between two surfaces.
inline constexpr Normalization kPairScoreNormalization = Normalization::FullGrid;

// `count` distinct row permutations of {0..n-1}, drawn uniformly from a
// 64-bit Mersenne Twister seeded with `seed`. Stream order is stable, so a
// shorter request is a prefix of a longer one.
std::vector<Permutation> sample_row_permutations(std::size_t n, std::size_t count, std::uint64_t seed);

// Samples request.candidates row permutations of sylvester_hadamard(order)
// and greedily picks k of them minimizing the running worst-case off-target
// |ncc| (ties go to the lexicographically smaller permutation). The greedy
// pass is repeated on every prefix of the candidate stream and the best
// result kept, so the score never gets worse as candidates grows.
//
// Throws ConfigError when k == 0, k > candidates, order < 4, or more
// candidates are requested than distinct permutations exist; SizeError for a
// non-power-of-two order.
PairSet generate_pair_set(const PairSetRequest& request);

// Recomputes the worst-case and mean off-target peaks of a pair list from
// scratch, comparing every key/lock combination explicitly.
struct PairScore {
  double worst = 0.0;
  double mean = 0.0;
};
PairScore score_pairs(const std::vector<SurfacePair>& pairs, Normalization norm = kPairScoreNormalization);

// Meta grid of per-block interaction assignments.
struct AssignmentGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Interaction> cells;  // row-major

  Interaction at(std::size_t r, std::size_t c) const { return cells.at(r * cols + c); }
};

struct CanvasLayout {
  PixelGrid token;
  std::size_t meta_rows = 0;
  std::size_t meta_cols = 0;
  AssignmentGrid assignments;
  PixelGrid canvas;
};

// Tiles a canvas with token-sized metapixels: Attract blocks hold
// complement(token), Repel blocks the token itself, Agnostic blocks a
// row-derangement of the token (aligned ncc exactly 0), or zeros for a 1x1
// token where no derangement exists.
// Throws DomainError for a non-square or non-Hadamard token and ShapeError
// for an empty or inconsistent assignment grid.
CanvasLayout canvas_compile(const PixelGrid& token, const AssignmentGrid& assignments);

PixelGrid extract_block(const PixelGrid& grid, std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols);

// Aligned ncc of the token against every metapixel block, row-major.
std::vector<double> measure_metapixels(const CanvasLayout& layout);

}  // namespace mixel
