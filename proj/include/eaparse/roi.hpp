#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eaparse/augment.hpp"
#include "eaparse/raster.hpp"

namespace eaparse {

/// Half-open pixel box: columns [x0, x1), rows [y0, y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool valid() const noexcept { return 0 <= x0 && x0 < x1 && 0 <= y0 && y0 < y1; }
  bool within(int frame_w, int frame_h) const noexcept {
    return valid() && x1 <= frame_w && y1 <= frame_h;
  }
  bool contains(const Box& other) const noexcept {
    return x0 <= other.x0 && y0 <= other.y0 && other.x1 <= x1 && other.y1 <= y1;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

inline constexpr double kDefaultExpandRatio = 0.2;

/// Parses "x0,y0,x1,y1".
Box parse_box(std::string_view text);

/// Grows each side by ratio * side_length / 2, rounds outward and clamps to
/// the frame.
Box expand_box(const Box& b, double ratio, int frame_w, int frame_h);

template <typename R>
R crop(const R& raster, const Box& b) {
  if (!b.within(raster.width(), raster.height())) {
    fail(Errc::OutOfBounds, "box exceeds the " + std::to_string(raster.width()) + "x" +
                                std::to_string(raster.height()) + " raster");
  }
  return copy_window(raster, b.y0, b.y1, b.x0, b.x1);
}

/// Background-transparent paste: non-zero patch pixels overwrite the canvas.
LabelMap paste(const LabelMap& canvas, const LabelMap& patch, const Box& b);

/// Confidence paste: each pixel inside the box keeps whichever source has the
/// higher max-class probability (the canvas wins ties). `canvas_prob` covers
/// the whole canvas, `patch_prob` the box.
LabelMap paste(const LabelMap& canvas, const LabelMap& patch, const Box& b,
               const ProbTensor& canvas_prob, const ProbTensor& patch_prob);

/// One detector box from a JSON-lines file: {"frame": name, "box": [x0,y0,x1,y1]}.
struct FrameBox {
  std::string frame;
  Box box;
};

std::vector<FrameBox> parse_box_lines(std::string_view jsonl);

}  // namespace eaparse
