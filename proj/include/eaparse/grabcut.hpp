#pragma once

#include <cstdint>
#include <vector>

#include "eaparse/gmm.hpp"
#include "eaparse/raster.hpp"

namespace eaparse {

enum class TrimapState : std::uint8_t {
  DefiniteBG = 0,
  DefiniteFG = 1,
  ProbableBG = 2,
  ProbableFG = 3,
};

struct TrimapTag {};
/// Each element holds a TrimapState value.
using Trimap = Raster<TrimapTag, 1>;

inline TrimapState trimap_state(const Trimap& t, int r, int c) {
  return static_cast<TrimapState>(t.at(r, c));
}

struct GrabcutParams {
  int components_k = 5;
  double gamma = 50.0;
  int iterations = 5;
  int erode_radius = 3;
  int dilate_radius = 10;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// DefiniteFG = erode(init, erode_radius), falling back to init when erosion
/// leaves nothing; DefiniteBG = complement of dilate(init, dilate_radius);
/// ProbableFG = init minus DefiniteFG; ProbableBG = the rest.
Trimap build_trimap(const BinaryMask& init, const GrabcutParams& params);

/// 1 / (2 * mean squared color difference over all 8-neighbor pairs), or 0
/// for a constant image.
double smoothness_beta(const RgbImage& image);

struct GrabcutResult {
  BinaryMask refined;
  /// Total energy (data + smoothness) after each iteration.
  std::vector<double> energy_trace;
};

/// Iterated graph-cut segmentation seeded from `init`. Definite trimap pixels
/// never change side; only probable pixels become graph nodes.
GrabcutResult grabcut_refine(const RgbImage& image, const BinaryMask& init,
                             const GrabcutParams& params);

/// Runs grabcut_refine on one class of a label map. Pixels gained take the
/// class id; pixels lost fall back to background (0).
LabelMap refine_class(const LabelMap& labels, const RgbImage& image, int class_id,
                      const GrabcutParams& params, std::vector<double>* energy_trace = nullptr);

}  // namespace eaparse
