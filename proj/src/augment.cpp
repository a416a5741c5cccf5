#include "eaparse/augment.hpp"

#include <numeric>
#include <string>

namespace eaparse {

SwapTable::SwapTable() { std::iota(lookup_.begin(), lookup_.end(), 0); }

SwapTable::SwapTable(std::vector<std::pair<int, int>> pairs) : SwapTable() {
  std::array<bool, 256> used{};
  for (const auto& [a, b] : pairs) {
    if (a < 0 || a > 255 || b < 0 || b > 255) {
      fail(Errc::InvalidConfig, "swap pair (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") outside class id range 0..255");
    }
    if (a == b) fail(Errc::InvalidConfig, "swap pair with identical ids " + std::to_string(a));
    if (used[static_cast<std::size_t>(a)] || used[static_cast<std::size_t>(b)]) {
      fail(Errc::InvalidConfig, "class id appears in more than one swap pair");
    }
    used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = true;
    lookup_[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(b);
    lookup_[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(a);
  }
  pairs_ = std::move(pairs);
}

CutSide parse_cut_side(std::string_view name) {
  if (name == "left") return CutSide::Left;
  if (name == "right") return CutSide::Right;
  if (name == "top") return CutSide::Top;
  if (name == "bottom") return CutSide::Bottom;
  fail(Errc::InvalidArgument, "unknown cut side '" + std::string(name) + "'");
}

std::string_view cut_side_name(CutSide side) noexcept {
  switch (side) {
    case CutSide::Left: return "left";
    case CutSide::Right: return "right";
    case CutSide::Top: return "top";
    case CutSide::Bottom: return "bottom";
  }
  return "left";
}

namespace {

void require_same_shape(const RgbImage& image, const LabelMap& labels) {
  if (!image.same_shape(labels)) {
    fail(Errc::ShapeMismatch, "image is " + std::to_string(image.height()) + "x" +
                                  std::to_string(image.width()) + ", labels are " +
                                  std::to_string(labels.height()) + "x" +
                                  std::to_string(labels.width()));
  }
}

}  // namespace

AugmentedPair hflip_with_swap(const RgbImage& image, const LabelMap& labels,
                              const SwapTable& swaps) {
  require_same_shape(image, labels);
  AugmentedPair out{flip_horizontal(image), flip_horizontal(labels)};
  for (auto& v : out.labels.data()) v = swaps.map(v);
  return out;
}

AugmentedPair rotate_quarter(const RgbImage& image, const LabelMap& labels, int quarters) {
  require_same_shape(image, labels);
  if (quarters == 1) return {rotate_clockwise(image), rotate_clockwise(labels)};
  if (quarters == 3) return {rotate_counterclockwise(image), rotate_counterclockwise(labels)};
  fail(Errc::InvalidArgument, "quarters must be 1 or 3, got " + std::to_string(quarters));
}

AugmentedPair cut_half(const RgbImage& image, const LabelMap& labels, CutSide side) {
  require_same_shape(image, labels);
  const int h = image.height();
  const int w = image.width();
  const bool horizontal = side == CutSide::Left || side == CutSide::Right;
  const int extent = horizontal ? w : h;
  if (extent < 2) {
    fail(Errc::TooSmall, "cut dimension must be >= 2, got " + std::to_string(extent));
  }
  const int lower_end = extent / 2;            // floor(n/2)
  const int upper_begin = (extent + 1) / 2;    // ceil(n/2)
  int r0 = 0, r1 = h, c0 = 0, c1 = w;
  switch (side) {
    case CutSide::Left: c1 = lower_end; break;
    case CutSide::Right: c0 = upper_begin; break;
    case CutSide::Top: r1 = lower_end; break;
    case CutSide::Bottom: r0 = upper_begin; break;
  }
  return {copy_window(image, r0, r1, c0, c1), copy_window(labels, r0, r1, c0, c1)};
}

}  // namespace eaparse
