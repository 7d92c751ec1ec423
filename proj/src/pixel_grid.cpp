#include "mixel/pixel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixel/errors.hpp"

namespace mixel {

void validate_pixel_value(double value, std::size_t row, std::size_t col) {
  if (!std::isfinite(value) || value < -1.0 || value > 1.0) {
    throw ValidationError("pixel value " + std::to_string(value) + " outside [-1, 1]", row, col);
  }
}

PixelGrid::PixelGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw SizeError("pixel grid dimensions must be positive");
  }
}

PixelGrid::PixelGrid(std::size_t rows, std::size_t cols, std::vector<double> values,
                     std::optional<std::vector<std::uint8_t>> write_mask)
    : rows_(rows), cols_(cols), values_(std::move(values)), mask_(std::move(write_mask)) {
  if (rows == 0 || cols == 0) {
    throw SizeError("pixel grid dimensions must be positive");
  }
  if (values_.size() != rows * cols) {
    throw ShapeError("expected " + std::to_string(rows * cols) + " values, got " + std::to_string(values_.size()));
  }
  if (mask_ && mask_->size() != values_.size()) {
    throw ShapeError("write mask size does not match grid");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    validate_pixel_value(values_[i], i / cols_, i % cols_);
    values_[i] += 0.0;  // fold -0.0 into +0.0
  }
}

PixelGrid PixelGrid::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw SizeError("pixel grid dimensions must be positive");
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ShapeError("ragged rows: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                       " values, expected " + std::to_string(cols));
    }
    flat.insert(flat.end(), rows[r].begin(), rows[r].end());
  }
  return PixelGrid(rows.size(), cols, std::move(flat));
}

PixelGrid PixelGrid::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> nested;
  nested.reserve(rows.size());
  for (const auto& r : rows) {
    nested.emplace_back(r);
  }
  return from_rows(nested);
}

void PixelGrid::check_index(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) {
    throw RangeError("cell (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " +
                     std::to_string(rows_) + "x" + std::to_string(cols_) + " grid");
  }
}

double PixelGrid::at(std::size_t row, std::size_t col) const {
  check_index(row, col);
  return values_[row * cols_ + col];
}

void PixelGrid::set(std::size_t row, std::size_t col, double value) {
  check_index(row, col);
  validate_pixel_value(value, row, col);
  values_[row * cols_ + col] = value + 0.0;
}

std::vector<double> PixelGrid::row_values(std::size_t row) const {
  check_index(row, 0);
  auto first = values_.begin() + static_cast<std::ptrdiff_t>(row * cols_);
  return {first, first + static_cast<std::ptrdiff_t>(cols_)};
}

bool PixelGrid::writes(std::size_t row, std::size_t col) const noexcept {
  const std::size_t i = row * cols_ + col;
  return mask_ ? (*mask_)[i] != 0 : values_[i] != 0.0;
}

std::size_t PixelGrid::write_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      n += writes(r, c) ? 1 : 0;
    }
  }
  return n;
}

void PixelGrid::set_mask(std::vector<std::uint8_t> mask) {
  if (mask.size() != values_.size()) {
    throw ShapeError("write mask size does not match grid");
  }
  for (auto& m : mask) {
    m = m ? 1 : 0;
  }
  mask_ = std::move(mask);
}

void PixelGrid::set_mask_cell(std::size_t row, std::size_t col, bool write) {
  check_index(row, col);
  if (!mask_) {
    mask_.emplace(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      (*mask_)[i] = values_[i] != 0.0 ? 1 : 0;
    }
  }
  (*mask_)[row * cols_ + col] = write ? 1 : 0;
}

}  // namespace mixel
