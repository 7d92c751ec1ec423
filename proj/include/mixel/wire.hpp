#pragma once

#include "json.hpp"
#include "mixel/control_service.hpp"
#include "mixel/interaction.hpp"
#include "mixel/magnet_model.hpp"
#include "mixel/pair_designer.hpp"
#include "mixel/toolpath.hpp"

// JSON bodies shared by the HTTP endpoints and the command-line tool.
namespace mixel::wire {

using nlohmann::json;

// {"k", "order", "candidates", "mode", "seed"}; absent fields take defaults.
PairSetRequest pair_request_from_json(const json& body);
// {"mode", "seed", "score", "mean_score", "normalization",
//  "pairs": [{"key": <pattern>, "lock": <pattern>, "rows": [...]}]}
json pair_set_to_json(const PairSet& set);

// Nested array of "attract" | "repel" | "agnostic".
AssignmentGrid assignments_from_json(const json& rows);
// {"meta_rows", "meta_cols", "canvas": <pattern>, "token": <pattern>,
//  "measured_ncc": [[...]]}
json canvas_to_json(const CanvasLayout& layout);

// {"normalization", "min_dx", "min_dy", "width", "height", "pixel_force",
//  "ncc": [[...]], "overlap": [[...]], "force_newtons": [[...]],
//  "peak_excluding_aligned"}; rows run over dy, columns over dx.
json interaction_map_to_json(const InteractionMap& map, double pixel_force = kDefaultPixelForceN);

json estimate_to_json(const JobEstimate& estimate);

// {"id", "kind", "state", "device", "progress", "total", "created_ms",
//  "started_ms", "finished_ms", "error", "report" | "result"}
json job_to_json(const Job& job, const ControlService& service);

json loop_to_json(const std::vector<LoopSample>& loop);

}  // namespace mixel::wire
