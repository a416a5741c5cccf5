#include "eaparse/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace eaparse {

std::vector<std::pair<int, int>> StructuringRadius::offsets() const {
  std::vector<std::pair<int, int>> out;
  const int r = radius_;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      if (dr * dr + dc * dc <= r * r) out.emplace_back(dr, dc);
    }
  }
  return out;
}

BinaryMask extract_boundary(const LabelMap& labels) {
  const int h = labels.height();
  const int w = labels.width();
  BinaryMask out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto v = labels.at(r, c);
      const bool differs = (r > 0 && labels.at(r - 1, c) != v) ||
                           (r + 1 < h && labels.at(r + 1, c) != v) ||
                           (c > 0 && labels.at(r, c - 1) != v) ||
                           (c + 1 < w && labels.at(r, c + 1) != v);
      out.at(r, c) = differs ? 1 : 0;
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, StructuringRadius radius) {
  const int r = radius.value();
  if (r == 0) return mask;
  const int h = mask.height();
  const int w = mask.width();

  // Row prefix sums turn each disk row into one interval query.
  std::vector<int> prefix(static_cast<std::size_t>(h) * (w + 1), 0);
  for (int row = 0; row < h; ++row) {
    int* p = &prefix[static_cast<std::size_t>(row) * (w + 1)];
    for (int c = 0; c < w; ++c) p[c + 1] = p[c] + (mask.at(row, c) != 0 ? 1 : 0);
  }
  std::vector<int> half_width(static_cast<std::size_t>(r) + 1);
  for (int dr = 0; dr <= r; ++dr) {
    int hw = 0;
    while ((hw + 1) * (hw + 1) + dr * dr <= r * r) ++hw;
    half_width[static_cast<std::size_t>(dr)] = hw;
  }

  BinaryMask out(h, w);
  for (int row = 0; row < h; ++row) {
    for (int c = 0; c < w; ++c) {
      bool hit = false;
      for (int dr = -r; dr <= r && !hit; ++dr) {
        const int src = row + dr;
        if (src < 0 || src >= h) continue;
        const int hw = half_width[static_cast<std::size_t>(std::abs(dr))];
        const int lo = std::max(0, c - hw);
        const int hi = std::min(w, c + hw + 1);
        const int* p = &prefix[static_cast<std::size_t>(src) * (w + 1)];
        hit = p[hi] - p[lo] > 0;
      }
      out.at(row, c) = hit ? 1 : 0;
    }
  }
  return out;
}

namespace {

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (auto& v : out.data()) v = v != 0 ? 0 : 1;
  return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, StructuringRadius radius) {
  return complement(dilate(complement(mask), radius));
}

BinaryMask edge_attention_mask(const LabelMap& labels, StructuringRadius radius) {
  return dilate(extract_boundary(labels), radius);
}

BinaryMask class_mask(const LabelMap& labels, int class_id) {
  BinaryMask out(labels.height(), labels.width());
  const auto src = labels.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == class_id ? 1 : 0;
  return out;
}

}  // namespace eaparse
