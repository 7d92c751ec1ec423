#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixel/pixel_grid.hpp"

namespace mixel {

using Permutation = std::vector<std::size_t>;

bool is_power_of_two(std::size_t n) noexcept;

// Sylvester-form Hadamard matrix built by recursive doubling
// H(2n) = [[H, H], [H, -H]]. First row and column are all +1.
// Throws SizeError unless order is a power of two.
PixelGrid sylvester_hadamard(std::size_t order);

// Element-wise negation; the write mask is preserved.
PixelGrid complement(const PixelGrid& grid);

// Output row i is input row perm[i]. The mask moves with its rows.
// Throws PermutationError for a wrong length or a non-bijection.
PixelGrid permute_rows(const PixelGrid& grid, std::span<const std::size_t> perm);

// value(i, j) = (-1)^(i + j)
PixelGrid checkerboard(std::size_t rows, std::size_t cols);

// Largest |dot product| / order over distinct row pairs and distinct column
// pairs. Zero exactly for Hadamard matrices.
// Throws DomainError for non-square grids or entries outside {+1, -1}.
double orthogonality_defect(const PixelGrid& grid);

bool is_permutation(std::span<const std::size_t> perm) noexcept;
Permutation identity_permutation(std::size_t n);

}  // namespace mixel
