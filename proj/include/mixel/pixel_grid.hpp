#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace mixel {

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Row-major matrix of normalized remanent flux values in [-1, +1].
//
// +1 is a fully saturated North pixel, -1 fully saturated South, 0 is
// demagnetized. An optional write mask marks which cells a plot job should
// program; without one, a cell is written iff its value is nonzero, so a 0
// reads as "unchanged". A masked 0 means "actively demagnetize".
class PixelGrid {
 public:
  PixelGrid() = default;

  // Zero-filled grid. Throws SizeError when either dimension is 0.
  PixelGrid(std::size_t rows, std::size_t cols);

  // Throws ShapeError on a length mismatch and ValidationError (naming the
  // cell) for a value outside [-1, 1] or non-finite.
  PixelGrid(std::size_t rows, std::size_t cols, std::vector<double> values,
            std::optional<std::vector<std::uint8_t>> write_mask = std::nullopt);

  // Builds from nested rows; ragged input throws ShapeError.
  static PixelGrid from_rows(const std::vector<std::vector<double>>& rows);
  static PixelGrid from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double at(std::size_t row, std::size_t col) const;
  double operator()(std::size_t row, std::size_t col) const noexcept { return values_[row * cols_ + col]; }
  void set(std::size_t row, std::size_t col, double value);

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double> row_values(std::size_t row) const;

  bool has_mask() const noexcept { return mask_.has_value(); }
  const std::optional<std::vector<std::uint8_t>>& mask() const noexcept { return mask_; }
  // Effective write flag: explicit mask when present, otherwise value != 0.
  bool writes(std::size_t row, std::size_t col) const noexcept;
  std::size_t write_count() const noexcept;

  void set_mask(std::vector<std::uint8_t> mask);
  void set_mask_cell(std::size_t row, std::size_t col, bool write);
  void clear_mask() noexcept { mask_.reset(); }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  void check_index(std::size_t row, std::size_t col) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::optional<std::vector<std::uint8_t>> mask_;
};

// Throws ValidationError when the value is non-finite or outside [-1, 1].
void validate_pixel_value(double value, std::size_t row, std::size_t col);

}  // namespace mixel
