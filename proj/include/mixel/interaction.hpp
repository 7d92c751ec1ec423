#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "mixel/pixel_grid.hpp"

namespace mixel {

// Translation of grid b relative to grid a, in pixels. Cell (i, j) of b sits
// over cell (i + dy, j + dx) of a.
struct Offset {
  long dx = 0;
  long dy = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

enum class Normalization {
  // Divide by the number of overlapping pixels (clean +-1 extremes at any offset).
  Overlap,
  // Divide by the smaller grid's pixel count; proportional to net force.
  FullGrid,
};

enum class Interaction { Attract, Repel, Agnostic };

std::string_view to_string(Normalization n) noexcept;
std::string_view to_string(Interaction i) noexcept;
Normalization normalization_from_string(std::string_view s);
Interaction interaction_from_string(std::string_view s);

inline constexpr double kDefaultClassifyEpsilon = 0.125;
// Measured 1.09 N for a fully aligned 8x8 pair at 0.5 mm gap, spread per pixel.
inline constexpr double kDefaultPixelForceN = 1.09 / 64.0;

// Number of overlapping cells at an offset (0 when disjoint).
std::size_t overlap_count(const PixelGrid& a, const PixelGrid& b, Offset offset) noexcept;

// Signed pixel-product sum over the overlap, normalized. Opposite polarities
// give negative products, so -1 is perfect attraction and +1 perfect
// repulsion. Throws RangeError when the offset has no overlap.
double ncc_at(const PixelGrid& a, const PixelGrid& b, Offset offset,
              Normalization norm = Normalization::Overlap);

// ncc over every offset with at least one overlapping pixel:
// dx in [-(b.cols - 1), a.cols - 1], dy in [-(b.rows - 1), a.rows - 1].
class InteractionMap {
 public:
  InteractionMap(long min_dx, long min_dy, std::size_t width, std::size_t height, Normalization norm);

  long min_dx() const noexcept { return min_dx_; }
  long min_dy() const noexcept { return min_dy_; }
  long max_dx() const noexcept { return min_dx_ + static_cast<long>(width_) - 1; }
  long max_dy() const noexcept { return min_dy_ + static_cast<long>(height_) - 1; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  Normalization normalization() const noexcept { return norm_; }

  bool contains(Offset o) const noexcept;
  // Throws RangeError outside the covered offsets.
  double ncc(Offset o) const;
  std::size_t overlap(Offset o) const;

  // Row-major by dy then dx, starting at (min_dx, min_dy).
  const std::vector<double>& ncc_values() const noexcept { return ncc_; }
  const std::vector<std::size_t>& overlap_values() const noexcept { return overlap_; }

  void set(Offset o, double ncc, std::size_t overlap);

 private:
  std::size_t index(Offset o) const;

  long min_dx_;
  long min_dy_;
  std::size_t width_;
  std::size_t height_;
  Normalization norm_;
  std::vector<double> ncc_;
  std::vector<std::size_t> overlap_;
};

// Throws DomainError when either grid is empty.
InteractionMap interaction_map(const PixelGrid& a, const PixelGrid& b,
                               Normalization norm = Normalization::Overlap);

// Attract below -epsilon, Repel above +epsilon, otherwise Agnostic.
// Throws DomainError unless epsilon > 0.
Interaction classify(double ncc, double epsilon = kDefaultClassifyEpsilon);

struct ForceEstimate {
  double newtons = 0.0;  // negative attracts, positive repels
  double pixel_force = kDefaultPixelForceN;
};

// Linear per-pixel superposition: newtons = ncc * overlap * pixel_force.
// Throws DomainError for a negative overlap or ncc outside [-1, 1].
ForceEstimate force_estimate(double ncc, long overlap, double pixel_force = kDefaultPixelForceN);

// Max |ncc| over the map, optionally skipping the aligned offset (0, 0).
// Lower is more mutually agnostic.
double agnosticism_peak(const PixelGrid& a, const PixelGrid& b, bool exclude_aligned,
                        Normalization norm = Normalization::Overlap);

}  // namespace mixel
