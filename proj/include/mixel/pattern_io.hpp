#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mixel/pixel_grid.hpp"

namespace mixel {

inline constexpr int kPatternFormatVersion = 1;
inline constexpr std::string_view kPatternFileExtension = ".mixel.json";

using Metadata = std::map<std::string, std::string>;

struct PatternFile {
  PixelGrid grid;
  Metadata metadata;
};

// Document layout (keys sorted):
//   {"cols": C, "format_version": 1, "metadata": {...}, "rows": R,
//    "values": [[...], ...], "write_mask": [[true, ...], ...]}
// write_mask is present only when the grid carries one. Integral values are
// written without a fraction.
nlohmann::json pattern_to_json(const PixelGrid& grid, const Metadata& metadata = {});

// Throws VersionError for format_version != 1, ShapeError for ragged or
// mismatched arrays, ValidationError (naming the cell when there is one) for
// bad values or field types, SizeError for a zero dimension.
PatternFile pattern_from_json(const nlohmann::json& doc);

// Deterministic bytes: identical input gives identical output.
std::string save_pattern(const PixelGrid& grid, const Metadata& metadata = {});

// As pattern_from_json, plus ParseError with 1-based line/column for
// malformed syntax.
PatternFile load_pattern(std::string_view text);

void save_pattern_file(const std::filesystem::path& path, const PixelGrid& grid, const Metadata& metadata = {});
PatternFile load_pattern_file(const std::filesystem::path& path);

// Delta between two revisions: the new value where a cell changed, 0 where
// it did not, with write_mask set exactly on the changed cells.
// Throws ShapeError on a dimension mismatch.
PixelGrid diff_delta(const PixelGrid& old_grid, const PixelGrid& new_grid);

// Overwrites every cell the delta writes. The result carries no mask.
// Throws ShapeError on a dimension mismatch.
PixelGrid apply_delta(const PixelGrid& base, const PixelGrid& delta);

// One line per row, comma separated, shortest round-trip numbers.
std::string grid_to_csv(const PixelGrid& grid);

}  // namespace mixel
