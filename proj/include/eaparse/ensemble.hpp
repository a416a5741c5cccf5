#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "eaparse/raster.hpp"

namespace eaparse {

/// Per-pixel softmax over channels (max-subtracted).
ProbTensor softmax_map(const LogitsTensor& logits);

/// Per-pixel argmax over channels; ties go to the lowest class id.
template <typename Tag>
LabelMap argmax_labels(const Tensor3<Tag>& t);

/// Bilinear resampling of every channel with half-pixel centers:
/// src = (dst + 0.5) * in/out - 0.5, clamped to the border.
template <typename Tag>
Tensor3<Tag> resize_bilinear(const Tensor3<Tag>& t, int out_h, int out_w);

/// Softmax each model, resize to the target, average probabilities with
/// uniform weights (input order), then argmax.
LabelMap ensemble_argmax(std::span<const LogitsTensor> inputs, int target_h, int target_w);

// ---------------------------------------------------------------------------

namespace detail {

struct AxisSample {
  int lo;
  int hi;
  double frac;
};

inline AxisSample axis_sample(int dst, int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  double src = (static_cast<double>(dst) + 0.5) * scale - 0.5;
  src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
  const int lo = static_cast<int>(std::floor(src));
  const int hi = std::min(lo + 1, in_size - 1);
  return {lo, hi, src - lo};
}

}  // namespace detail

template <typename Tag>
LabelMap argmax_labels(const Tensor3<Tag>& t) {
  if (t.channels() > 256) {
    fail(Errc::InvalidShape, "argmax into 8-bit labels needs <= 256 channels");
  }
  LabelMap out(t.height(), t.width());
  const std::size_t plane = t.plane_size();
  const auto data = t.data();
  for (std::size_t p = 0; p < plane; ++p) {
    int best = 0;
    double best_v = data[p];
    for (int c = 1; c < t.channels(); ++c) {
      const double v = data[static_cast<std::size_t>(c) * plane + p];
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    out.data()[p] = static_cast<std::uint8_t>(best);
  }
  return out;
}

template <typename Tag>
Tensor3<Tag> resize_bilinear(const Tensor3<Tag>& t, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) fail(Errc::InvalidShape, "resize target must be >= 1x1");
  Tensor3<Tag> out(t.channels(), out_h, out_w);
  std::vector<detail::AxisSample> rows(static_cast<std::size_t>(out_h));
  std::vector<detail::AxisSample> cols(static_cast<std::size_t>(out_w));
  for (int r = 0; r < out_h; ++r) rows[static_cast<std::size_t>(r)] = detail::axis_sample(r, t.height(), out_h);
  for (int c = 0; c < out_w; ++c) cols[static_cast<std::size_t>(c)] = detail::axis_sample(c, t.width(), out_w);
  for (int ch = 0; ch < t.channels(); ++ch) {
    for (int r = 0; r < out_h; ++r) {
      const auto& ry = rows[static_cast<std::size_t>(r)];
      for (int c = 0; c < out_w; ++c) {
        const auto& cx = cols[static_cast<std::size_t>(c)];
        const double top = (1.0 - cx.frac) * t.at(ch, ry.lo, cx.lo) + cx.frac * t.at(ch, ry.lo, cx.hi);
        const double bottom =
            (1.0 - cx.frac) * t.at(ch, ry.hi, cx.lo) + cx.frac * t.at(ch, ry.hi, cx.hi);
        out.at(ch, r, c) = (1.0 - ry.frac) * top + ry.frac * bottom;
      }
    }
  }
  return out;
}

}  // namespace eaparse
