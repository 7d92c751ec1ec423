#include "mixel/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixel/errors.hpp"

namespace mixel {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

PixelGrid sylvester_hadamard(std::size_t order) {
  if (!is_power_of_two(order)) {
    throw SizeError("Hadamard order " + std::to_string(order) + " is not a power of two");
  }
  std::vector<double> h{1.0};
  for (std::size_t n = 1; n < order; n *= 2) {
    const std::size_t m = 2 * n;
    std::vector<double> next(m * m);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const double v = h[r * n + c];
        next[r * m + c] = v;
        next[r * m + c + n] = v;
        next[(r + n) * m + c] = v;
        next[(r + n) * m + c + n] = -v;
      }
    }
    h = std::move(next);
  }
  return PixelGrid(order, order, std::move(h));
}

PixelGrid complement(const PixelGrid& grid) {
  std::vector<double> negated(grid.values().begin(), grid.values().end());
  for (auto& v : negated) {
    v = -v;
  }
  return PixelGrid(grid.rows(), grid.cols(), std::move(negated), grid.mask());
}

bool is_permutation(std::span<const std::size_t> perm) noexcept {
  std::vector<bool> seen(perm.size(), false);
  for (auto p : perm) {
    if (p >= perm.size() || seen[p]) {
      return false;
    }
    seen[p] = true;
  }
  return true;
}

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

PixelGrid permute_rows(const PixelGrid& grid, std::span<const std::size_t> perm) {
  if (perm.size() != grid.rows()) {
    throw PermutationError("permutation length " + std::to_string(perm.size()) + " does not match " +
                           std::to_string(grid.rows()) + " rows");
  }
  if (!is_permutation(perm)) {
    throw PermutationError("row permutation is not a bijection");
  }
  const std::size_t cols = grid.cols();
  std::vector<double> values(grid.size());
  std::optional<std::vector<std::uint8_t>> mask;
  if (grid.has_mask()) {
    mask.emplace(grid.size());
  }
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const std::size_t src = perm[r];
    std::copy_n(grid.values().begin() + static_cast<std::ptrdiff_t>(src * cols), cols,
                values.begin() + static_cast<std::ptrdiff_t>(r * cols));
    if (mask) {
      std::copy_n(grid.mask()->begin() + static_cast<std::ptrdiff_t>(src * cols), cols,
                  mask->begin() + static_cast<std::ptrdiff_t>(r * cols));
    }
  }
  return PixelGrid(grid.rows(), cols, std::move(values), std::move(mask));
}

PixelGrid checkerboard(std::size_t rows, std::size_t cols) {
  PixelGrid grid(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      grid.set(r, c, (r + c) % 2 == 0 ? 1.0 : -1.0);
    }
  }
  return grid;
}

double orthogonality_defect(const PixelGrid& grid) {
  if (grid.empty() || grid.rows() != grid.cols()) {
    throw DomainError("orthogonality defect needs a square grid");
  }
  for (double v : grid.values()) {
    if (v != 1.0 && v != -1.0) {
      throw DomainError("orthogonality defect needs entries in {+1, -1}");
    }
  }
  const std::size_t n = grid.rows();
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double row_dot = 0.0;
      double col_dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        row_dot += grid(a, k) * grid(b, k);
        col_dot += grid(k, a) * grid(k, b);
      }
      worst = std::max({worst, std::abs(row_dot), std::abs(col_dot)});
    }
  }
  return worst / static_cast<double>(n);
}

}  // namespace mixel
