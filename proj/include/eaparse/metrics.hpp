#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eaparse/raster.hpp"

namespace eaparse {

/// Region similarity |pred & gt| / |pred | gt|. nullopt ("Skip") when both
/// masks are empty; 0 when exactly one is.
std::optional<double> region_jaccard(const BinaryMask& pred, const BinaryMask& gt);

/// Contour accuracy: F-measure of boundary precision/recall where a boundary
/// pixel matches if the other boundary lies within `tolerance_px` (Euclidean
/// disk). nullopt when both boundaries are empty; 0 when exactly one is.
std::optional<double> boundary_f(const BinaryMask& pred, const BinaryMask& gt, int tolerance_px);

/// max(1, round(0.008 * image diagonal)).
int default_boundary_tolerance(int height, int width);

struct ClassScore {
  double mean_j = 0.0;
  double mean_f = 0.0;
  int frames_counted = 0;
};

struct EvalReport {
  std::map<int, ClassScore> per_class;
  double mean_j = 0.0;
  double mean_f = 0.0;
  double j_and_f = 0.0;

  /// {"per_class":{"<id>":{"J":..,"F":..,"frames":n}},"mean_J":..,"mean_F":..,"J_and_F":..}
  std::string to_json() const;
};

/// Per class and frame: binarize both maps, score J and F. A (class, frame)
/// pair is skipped when the class is absent from both maps. Class means are
/// over counted frames; the aggregate is the unweighted mean over classes
/// with at least one counted frame.
EvalReport evaluate_frames(std::span<const LabelMap> preds, std::span<const LabelMap> gts,
                           std::span<const int> class_ids, int tolerance_px);

}  // namespace eaparse
