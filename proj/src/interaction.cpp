#include "mixel/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixel/errors.hpp"

namespace mixel {

std::string_view to_string(Normalization n) noexcept {
  return n == Normalization::Overlap ? "overlap" : "full";
}

std::string_view to_string(Interaction i) noexcept {
  switch (i) {
    case Interaction::Attract:
      return "attract";
    case Interaction::Repel:
      return "repel";
    case Interaction::Agnostic:
      return "agnostic";
  }
  return "agnostic";
}

Normalization normalization_from_string(std::string_view s) {
  if (s == "overlap") return Normalization::Overlap;
  if (s == "full") return Normalization::FullGrid;
  throw DomainError("unknown normalization '" + std::string(s) + "'");
}

Interaction interaction_from_string(std::string_view s) {
  if (s == "attract") return Interaction::Attract;
  if (s == "repel") return Interaction::Repel;
  if (s == "agnostic") return Interaction::Agnostic;
  throw DomainError("unknown interaction '" + std::string(s) + "'");
}

namespace {

struct Span1D {
  long lo;  // first index in b
  long hi;  // one past last
};

// Range of b indices k with 0 <= k < nb and 0 <= k + shift < na.
Span1D overlap_range(std::size_t na, std::size_t nb, long shift) noexcept {
  const long lo = std::max(0L, -shift);
  const long hi = std::min(static_cast<long>(nb), static_cast<long>(na) - shift);
  return {lo, std::max(lo, hi)};
}

double divisor(const PixelGrid& a, const PixelGrid& b, std::size_t overlap, Normalization norm) noexcept {
  if (norm == Normalization::Overlap) {
    return static_cast<double>(overlap);
  }
  return static_cast<double>(std::min(a.size(), b.size()));
}

}  // namespace

std::size_t overlap_count(const PixelGrid& a, const PixelGrid& b, Offset offset) noexcept {
  const auto rows = overlap_range(a.rows(), b.rows(), offset.dy);
  const auto cols = overlap_range(a.cols(), b.cols(), offset.dx);
  return static_cast<std::size_t>((rows.hi - rows.lo) * (cols.hi - cols.lo));
}

double ncc_at(const PixelGrid& a, const PixelGrid& b, Offset offset, Normalization norm) {
  const auto rows = overlap_range(a.rows(), b.rows(), offset.dy);
  const auto cols = overlap_range(a.cols(), b.cols(), offset.dx);
  const auto count = static_cast<std::size_t>((rows.hi - rows.lo) * (cols.hi - cols.lo));
  if (count == 0) {
    throw RangeError("offset (" + std::to_string(offset.dx) + ", " + std::to_string(offset.dy) +
                     ") has no overlapping pixels");
  }
  double sum = 0.0;
  for (long i = rows.lo; i < rows.hi; ++i) {
    const auto ai = static_cast<std::size_t>(i + offset.dy);
    for (long j = cols.lo; j < cols.hi; ++j) {
      sum += a(ai, static_cast<std::size_t>(j + offset.dx)) * b(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return sum / divisor(a, b, count, norm);
}

InteractionMap::InteractionMap(long min_dx, long min_dy, std::size_t width, std::size_t height, Normalization norm)
    : min_dx_(min_dx),
      min_dy_(min_dy),
      width_(width),
      height_(height),
      norm_(norm),
      ncc_(width * height, 0.0),
      overlap_(width * height, 0) {}

bool InteractionMap::contains(Offset o) const noexcept {
  return o.dx >= min_dx_ && o.dx <= max_dx() && o.dy >= min_dy_ && o.dy <= max_dy();
}

std::size_t InteractionMap::index(Offset o) const {
  if (!contains(o)) {
    throw RangeError("offset (" + std::to_string(o.dx) + ", " + std::to_string(o.dy) + ") outside interaction map");
  }
  return static_cast<std::size_t>(o.dy - min_dy_) * width_ + static_cast<std::size_t>(o.dx - min_dx_);
}

double InteractionMap::ncc(Offset o) const { return ncc_[index(o)]; }

std::size_t InteractionMap::overlap(Offset o) const { return overlap_[index(o)]; }

void InteractionMap::set(Offset o, double ncc, std::size_t overlap) {
  const auto i = index(o);
  ncc_[i] = ncc;
  overlap_[i] = overlap;
}

InteractionMap interaction_map(const PixelGrid& a, const PixelGrid& b, Normalization norm) {
  if (a.empty() || b.empty()) {
    throw DomainError("interaction map needs two nonempty grids");
  }
  const long min_dx = -(static_cast<long>(b.cols()) - 1);
  const long min_dy = -(static_cast<long>(b.rows()) - 1);
  InteractionMap map(min_dx, min_dy, a.cols() + b.cols() - 1, a.rows() + b.rows() - 1, norm);
  for (long dy = min_dy; dy <= map.max_dy(); ++dy) {
    for (long dx = min_dx; dx <= map.max_dx(); ++dx) {
      const Offset o{dx, dy};
      map.set(o, ncc_at(a, b, o, norm), overlap_count(a, b, o));
    }
  }
  return map;
}

Interaction classify(double ncc, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw DomainError("classification epsilon must be positive");
  }
  if (ncc < -epsilon) return Interaction::Attract;
  if (ncc > epsilon) return Interaction::Repel;
  return Interaction::Agnostic;
}

ForceEstimate force_estimate(double ncc, long overlap, double pixel_force) {
  if (overlap < 0) {
    throw DomainError("overlap count must be nonnegative");
  }
  if (!(ncc >= -1.0 && ncc <= 1.0)) {
    throw DomainError("ncc must lie in [-1, 1]");
  }
  return {ncc * static_cast<double>(overlap) * pixel_force, pixel_force};
}

double agnosticism_peak(const PixelGrid& a, const PixelGrid& b, bool exclude_aligned, Normalization norm) {
  const auto map = interaction_map(a, b, norm);
  double peak = 0.0;
  for (long dy = map.min_dy(); dy <= map.max_dy(); ++dy) {
    for (long dx = map.min_dx(); dx <= map.max_dx(); ++dx) {
      if (exclude_aligned && dx == 0 && dy == 0) {
        continue;
      }
      peak = std::max(peak, std::abs(map.ncc({dx, dy})));
    }
  }
  return peak;
}

}  // namespace mixel
