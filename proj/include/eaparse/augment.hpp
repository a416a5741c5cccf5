#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "eaparse/raster.hpp"

namespace eaparse {

/// Left/right class pairs that trade places under a horizontal flip
/// (eyes, eyebrows, ...). The induced relabeling is an involution.
class SwapTable {
 public:
  SwapTable();
  explicit SwapTable(std::vector<std::pair<int, int>> pairs);

  std::uint8_t map(std::uint8_t id) const noexcept { return lookup_[id]; }
  const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }

 private:
  std::vector<std::pair<int, int>> pairs_;
  std::array<std::uint8_t, 256> lookup_{};
};

struct AugmentedPair {
  RgbImage image;
  LabelMap labels;
};

enum class CutSide { Left, Right, Top, Bottom };

CutSide parse_cut_side(std::string_view name);
std::string_view cut_side_name(CutSide side) noexcept;

/// Mirrors both rasters left-to-right, then relabels symmetric classes.
AugmentedPair hflip_with_swap(const RgbImage& image, const LabelMap& labels,
                              const SwapTable& swaps);

/// Lossless clockwise rotation by 90 (quarters = 1) or 270 (quarters = 3)
/// degrees. Labels are not remapped.
AugmentedPair rotate_quarter(const RgbImage& image, const LabelMap& labels, int quarters);

/// Keeps one half: left = columns [0, floor(W/2)), right = [ceil(W/2), W),
/// and the same for rows. On odd sizes the middle line belongs to neither.
AugmentedPair cut_half(const RgbImage& image, const LabelMap& labels, CutSide side);

// Geometric primitives shared by the augmentations (and usable on any raster).

template <typename R>
R flip_horizontal(const R& src) {
  R out(src.height(), src.width());
  for (int r = 0; r < src.height(); ++r) {
    for (int c = 0; c < src.width(); ++c) {
      for (int ch = 0; ch < R::kChannels; ++ch) {
        out.at(r, src.width() - 1 - c, ch) = src.at(r, c, ch);
      }
    }
  }
  return out;
}

/// One clockwise quarter turn: source (r,c) of an HxW raster lands on (c, H-1-r).
template <typename R>
R rotate_clockwise(const R& src) {
  const int h = src.height();
  R out(src.width(), h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < src.width(); ++c) {
      for (int ch = 0; ch < R::kChannels; ++ch) out.at(c, h - 1 - r, ch) = src.at(r, c, ch);
    }
  }
  return out;
}

/// Inverse of rotate_clockwise: source (r,c) lands on (W-1-c, r).
template <typename R>
R rotate_counterclockwise(const R& src) {
  const int w = src.width();
  R out(w, src.height());
  for (int r = 0; r < src.height(); ++r) {
    for (int c = 0; c < w; ++c) {
      for (int ch = 0; ch < R::kChannels; ++ch) out.at(w - 1 - c, r, ch) = src.at(r, c, ch);
    }
  }
  return out;
}

/// Copies the half-open window rows [r0, r1) x columns [c0, c1).
template <typename R>
R copy_window(const R& src, int r0, int r1, int c0, int c1) {
  R out(r1 - r0, c1 - c0);
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      for (int ch = 0; ch < R::kChannels; ++ch) out.at(r - r0, c - c0, ch) = src.at(r, c, ch);
    }
  }
  return out;
}

}  // namespace eaparse
