#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eaparse/boundary.hpp"
#include "eaparse/grabcut.hpp"
#include "eaparse/roi.hpp"
#include "eaparse/segloss.hpp"

namespace eaparse {

/// Every tunable constant of the toolkit in one document. Unknown keys are
/// rejected; missing keys keep the defaults below.
///
///   {
///     "swap_pairs": [[a, b], ...],
///     "edge_radius": 2,
///     "lambda_edge": 1.0,
///     "lambda_boundary": 1.0,
///     "grabcut": {"components": 5, "gamma": 50.0, "iterations": 5,
///                 "erode": 3, "dilate": 10},
///     "grabcut_classes": [],
///     "roi_expand": 0.2,
///     "classes": null,
///     "tolerance": null,
///     "seed": 0
///   }
struct PipelineConfig {
  std::vector<std::pair<int, int>> swap_pairs;
  int edge_radius = kDefaultEdgeRadius;
  LossWeights loss;
  /// rng_seed is ignored here; seeds derive from `seed`.
  GrabcutParams grabcut;
  /// Classes refined with GrabCut after ensembling; empty disables refinement.
  std::vector<int> grabcut_classes;
  double roi_expand = kDefaultExpandRatio;
  /// Classes scored by eval/pipeline; unset = every non-zero id present.
  std::optional<std::vector<int>> classes;
  /// Boundary tolerance in pixels; unset = diagonal-proportional default.
  std::optional<int> tolerance;
  std::uint64_t seed = 0;
};

PipelineConfig parse_config(std::string_view json_text);
std::string config_to_json(const PipelineConfig& config);

}  // namespace eaparse
