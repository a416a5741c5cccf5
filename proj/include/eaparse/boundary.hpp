#pragma once

#include <utility>
#include <vector>

#include "eaparse/raster.hpp"

namespace eaparse {

/// Discrete disk {(dr,dc) : dr^2 + dc^2 <= r^2}. Radius 0 is the center only.
class StructuringRadius {
 public:
  constexpr StructuringRadius() = default;
  explicit StructuringRadius(int radius) : radius_(radius) {
    if (radius < 0) fail(Errc::InvalidArgument, "structuring radius must be >= 0");
  }
  constexpr int value() const noexcept { return radius_; }

  /// Offsets of the disk, row-major order.
  std::vector<std::pair<int, int>> offsets() const;

 private:
  int radius_ = 0;
};

/// Edge-attention band width at the 448 working resolution.
inline constexpr int kDefaultEdgeRadius = 2;

/// A pixel is on the boundary iff one of its in-bounds 4-neighbors carries a
/// different class id. Both sides of every label change are flagged.
BinaryMask extract_boundary(const LabelMap& labels);

BinaryMask dilate(const BinaryMask& mask, StructuringRadius radius);

/// Dual of dilate: out-of-image neighbors are ignored, so erosion does not
/// eat in from the image border.
BinaryMask erode(const BinaryMask& mask, StructuringRadius radius);

/// dilate(extract_boundary(labels), radius): the region scored by the
/// edge-attention loss.
BinaryMask edge_attention_mask(const LabelMap& labels, StructuringRadius radius);

/// Binarizes a label map on one class id.
BinaryMask class_mask(const LabelMap& labels, int class_id);

}  // namespace eaparse
