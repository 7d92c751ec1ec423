#include "mixel/wire.hpp"

#include <algorithm>
#include <cmath>

#include "mixel/errors.hpp"
#include "mixel/pattern_io.hpp"

namespace mixel::wire {
namespace {

template <typename T>
T field_or(const json& body, const char* key, T fallback) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    return fallback;
  }
  return it->get<T>();
}

json optional_ms(const std::optional<Clock::time_point>& t, const ControlService& service) {
  return t ? json(service.epoch_ms(*t)) : json(nullptr);
}

}  // namespace

PairSetRequest pair_request_from_json(const json& body) {
  if (!body.is_object()) {
    throw ValidationError("pair request must be an object");
  }
  PairSetRequest req;
  req.k = field_or<std::size_t>(body, "k", req.k);
  req.order = field_or<std::size_t>(body, "order", req.order);
  req.candidates = field_or<std::size_t>(body, "candidates", req.candidates);
  req.seed = field_or<std::uint64_t>(body, "seed", req.seed);
  req.mode = pair_mode_from_string(field_or<std::string>(body, "mode", std::string(to_string(req.mode))));
  return req;
}

json pair_set_to_json(const PairSet& set) {
  json pairs = json::array();
  for (const auto& p : set.pairs) {
    pairs.push_back({{"key", pattern_to_json(p.key)}, {"lock", pattern_to_json(p.lock)}, {"rows", p.rows}});
  }
  return {
      {"mode", to_string(set.mode)},
      {"seed", set.seed},
      {"score", set.score},
      {"mean_score", set.mean_score},
      {"normalization", to_string(kPairScoreNormalization)},
      {"pairs", std::move(pairs)},
  };
}

AssignmentGrid assignments_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) {
    throw ShapeError("assignments must be a non-empty array of rows");
  }
  AssignmentGrid grid;
  grid.rows = rows.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].empty()) {
      throw ShapeError("assignment row " + std::to_string(r) + " must be a non-empty array");
    }
    if (r == 0) {
      grid.cols = rows[r].size();
    } else if (rows[r].size() != grid.cols) {
      throw ShapeError("assignment row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                       " entries, expected " + std::to_string(grid.cols));
    }
    for (const auto& cell : rows[r]) {
      grid.cells.push_back(interaction_from_string(cell.get<std::string>()));
    }
  }
  return grid;
}

json canvas_to_json(const CanvasLayout& layout) {
  const auto measured = measure_metapixels(layout);
  json rows = json::array();
  for (std::size_t r = 0; r < layout.meta_rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < layout.meta_cols; ++c) {
      row.push_back(measured[r * layout.meta_cols + c]);
    }
    rows.push_back(std::move(row));
  }
  return {
      {"meta_rows", layout.meta_rows},
      {"meta_cols", layout.meta_cols},
      {"token", pattern_to_json(layout.token)},
      {"canvas", pattern_to_json(layout.canvas)},
      {"measured_ncc", std::move(rows)},
  };
}

json interaction_map_to_json(const InteractionMap& map, double pixel_force) {
  json ncc = json::array();
  json overlap = json::array();
  json force = json::array();
  double peak = 0.0;
  for (std::size_t y = 0; y < map.height(); ++y) {
    json ncc_row = json::array();
    json overlap_row = json::array();
    json force_row = json::array();
    for (std::size_t x = 0; x < map.width(); ++x) {
      const Offset o{map.min_dx() + static_cast<long>(x), map.min_dy() + static_cast<long>(y)};
      const double v = map.ncc(o);
      const std::size_t n = map.overlap(o);
      ncc_row.push_back(v);
      overlap_row.push_back(n);
      force_row.push_back(force_estimate(v, static_cast<long>(n), pixel_force).newtons);
      if (!(o.dx == 0 && o.dy == 0)) {
        peak = std::max(peak, std::abs(v));
      }
    }
    ncc.push_back(std::move(ncc_row));
    overlap.push_back(std::move(overlap_row));
    force.push_back(std::move(force_row));
  }
  return {
      {"normalization", to_string(map.normalization())},
      {"min_dx", map.min_dx()},
      {"min_dy", map.min_dy()},
      {"width", map.width()},
      {"height", map.height()},
      {"pixel_force", pixel_force},
      {"ncc", std::move(ncc)},
      {"overlap", std::move(overlap)},
      {"force_newtons", std::move(force)},
      {"peak_excluding_aligned", peak},
  };
}

json estimate_to_json(const JobEstimate& e) {
  return {
      {"duration_s", e.duration_s},
      {"energy_j", e.energy_j},
      {"energize_s", e.energize_s},
      {"pulse_energy_j", e.pulse_energy_j},
      {"travel_s", e.travel_s},
      {"pixels_written", e.pixels_written},
      {"pixels_skipped", e.pixels_skipped},
      {"pixels_read", e.pixels_read},
  };
}

json job_to_json(const Job& job, const ControlService& service) {
  json out = {
      {"id", job.id},
      {"kind", to_string(job.kind)},
      {"state", to_string(job.state)},
      {"device", job.device},
      {"progress", job.progress},
      {"total", job.total},
      {"created_ms", service.epoch_ms(job.created)},
      {"started_ms", optional_ms(job.started, service)},
      {"finished_ms", optional_ms(job.finished, service)},
      {"error", job.error ? json(*job.error) : json(nullptr)},
  };
  if (job.report) {
    out["report"] = {
        {"pixels_written", job.report->pixels_written},
        {"pixels_skipped", job.report->pixels_skipped},
        {"commands_sent", job.report->commands_sent},
        {"estimate", estimate_to_json(job.report->estimate)},
    };
  }
  if (job.result) {
    out["result"] = pattern_to_json(job.result->grid, job.result->metadata);
  }
  return out;
}

json loop_to_json(const std::vector<LoopSample>& loop) {
  json samples = json::array();
  for (const auto& s : loop) {
    samples.push_back({{"current_amps", s.amps}, {"flux_tesla", s.flux}, {"branch", to_string(s.branch)}});
  }
  return samples;
}

}  // namespace mixel::wire
