#include "mixel/pattern_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "mixel/errors.hpp"
#include "mixel/format.hpp"

namespace mixel {
namespace {

using nlohmann::json;

json encode_value(double v) {
  if (v == std::floor(v)) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

std::size_t read_dimension(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  if (!it->is_number_unsigned()) {
    throw ValidationError(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return it->get<std::size_t>();
}

const json& read_rows(const json& doc, const char* key, std::size_t rows, std::size_t cols) {
  const auto& field = doc.at(key);
  if (!field.is_array()) {
    throw ShapeError(std::string("field '") + key + "' must be an array of rows");
  }
  if (field.size() != rows) {
    throw ShapeError(std::string("field '") + key + "' has " + std::to_string(field.size()) + " rows, expected " +
                     std::to_string(rows));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = field[r];
    if (!row.is_array()) {
      throw ShapeError(std::string("field '") + key + "' row " + std::to_string(r) + " is not an array");
    }
    if (row.size() != cols) {
      throw ShapeError(std::string("field '") + key + "' row " + std::to_string(r) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
  }
  return field;
}

// 1-based line and column of a 1-based byte position.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void require_same_shape(const PixelGrid& a, const PixelGrid& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("grid shapes differ: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

nlohmann::json pattern_to_json(const PixelGrid& grid, const Metadata& metadata) {
  json values = json::array();
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      row.push_back(encode_value(grid(r, c)));
    }
    values.push_back(std::move(row));
  }
  json doc = {
      {"format_version", kPatternFormatVersion},
      {"rows", grid.rows()},
      {"cols", grid.cols()},
      {"values", std::move(values)},
      {"metadata", json(metadata)},
  };
  if (grid.has_mask()) {
    json mask = json::array();
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        row.push_back(grid.writes(r, c));
      }
      mask.push_back(std::move(row));
    }
    doc["write_mask"] = std::move(mask);
  }
  return doc;
}

PatternFile pattern_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("pattern document must be an object");
  }
  const auto version = doc.find("format_version");
  if (version == doc.end()) {
    throw ValidationError("missing field 'format_version'");
  }
  if (!version->is_number_integer()) {
    throw ValidationError("field 'format_version' must be an integer");
  }
  if (version->get<std::int64_t>() != kPatternFormatVersion) {
    throw VersionError("unsupported format_version " + version->dump() + ", expected " +
                       std::to_string(kPatternFormatVersion));
  }
  const std::size_t rows = read_dimension(doc, "rows");
  const std::size_t cols = read_dimension(doc, "cols");
  if (!doc.contains("values")) {
    throw ValidationError("missing field 'values'");
  }
  const auto& value_rows = read_rows(doc, "values", rows, cols);

  std::vector<double> values;
  values.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& v = value_rows[r][c];
      if (!v.is_number()) {
        throw ValidationError("pixel value must be a number", r, c);
      }
      values.push_back(v.get<double>());
      validate_pixel_value(values.back(), r, c);
    }
  }

  std::optional<std::vector<std::uint8_t>> mask;
  if (doc.contains("write_mask") && !doc.at("write_mask").is_null()) {
    const auto& mask_rows = read_rows(doc, "write_mask", rows, cols);
    mask.emplace();
    mask->reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const auto& m = mask_rows[r][c];
        if (!m.is_boolean()) {
          throw ValidationError("write_mask entry must be a boolean", r, c);
        }
        mask->push_back(m.get<bool>() ? 1 : 0);
      }
    }
  }

  PatternFile out{PixelGrid(rows, cols, std::move(values), std::move(mask)), {}};
  if (const auto meta = doc.find("metadata"); meta != doc.end() && !meta->is_null()) {
    if (!meta->is_object()) {
      throw ValidationError("field 'metadata' must be an object");
    }
    for (const auto& [key, value] : meta->items()) {
      if (!value.is_string()) {
        throw ValidationError("metadata entry '" + key + "' must be a string");
      }
      out.metadata.emplace(key, value.get<std::string>());
    }
  }
  return out;
}

// Sorted keys, two-space indent, one grid row per line.
std::string save_pattern(const PixelGrid& grid, const Metadata& metadata) {
  const json doc = pattern_to_json(grid, metadata);
  std::string out = "{\n";
  bool first = true;
  for (const auto& [key, value] : doc.items()) {
    out += first ? "  " : ",\n  ";
    first = false;
    out += json(key).dump() + ": ";
    if (key == "values" || key == "write_mask") {
      out += "[";
      for (std::size_t r = 0; r < value.size(); ++r) {
        out += r == 0 ? "\n    " : ",\n    ";
        out += value[r].dump(-1, ' ', false);
      }
      out += "\n  ]";
    } else {
      out += value.dump();
    }
  }
  out += "\n}\n";
  return out;
}

PatternFile load_pattern(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte);
    throw ParseError("malformed pattern document", line, column);
  }
  return pattern_from_json(doc);
}

void save_pattern_file(const std::filesystem::path& path, const PixelGrid& grid, const Metadata& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << save_pattern(grid, metadata);
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

PatternFile load_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw NotFoundError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_pattern(buf.str());
}

PixelGrid diff_delta(const PixelGrid& old_grid, const PixelGrid& new_grid) {
  require_same_shape(old_grid, new_grid);
  std::vector<double> values(new_grid.size(), 0.0);
  std::vector<std::uint8_t> mask(new_grid.size(), 0);
  for (std::size_t r = 0; r < new_grid.rows(); ++r) {
    for (std::size_t c = 0; c < new_grid.cols(); ++c) {
      if (old_grid(r, c) != new_grid(r, c)) {
        values[r * new_grid.cols() + c] = new_grid(r, c);
        mask[r * new_grid.cols() + c] = 1;
      }
    }
  }
  return PixelGrid(new_grid.rows(), new_grid.cols(), std::move(values), std::move(mask));
}

PixelGrid apply_delta(const PixelGrid& base, const PixelGrid& delta) {
  require_same_shape(base, delta);
  std::vector<double> values(base.values().begin(), base.values().end());
  for (std::size_t r = 0; r < base.rows(); ++r) {
    for (std::size_t c = 0; c < base.cols(); ++c) {
      if (delta.writes(r, c)) {
        values[r * base.cols() + c] = delta(r, c);
      }
    }
  }
  return PixelGrid(base.rows(), base.cols(), std::move(values));
}

std::string grid_to_csv(const PixelGrid& grid) {
  std::string out;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (c > 0) {
        out += ',';
      }
      out += shortest(grid(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mixel
