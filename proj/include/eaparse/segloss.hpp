#pragma once

#include <cstddef>
#include <optional>

#include "eaparse/raster.hpp"

namespace eaparse {

/// Mean loss over contributing pixels, with the optional gradient with respect
/// to the input logits (same shape as the input).
struct LossResult {
  double loss = 0.0;
  std::size_t contributing_pixels = 0;
  std::optional<LogitsTensor> gradient;
};

struct LossWeights {
  double lambda_edge = 1.0;
  double lambda_boundary = 1.0;

  void validate() const;
};

/// Combined loss. `seg_gradient` is the gradient for the segmentation logits
/// (plain CE plus weighted edge-attention CE); `edge_gradient` belongs to the
/// 1-channel edge head.
struct TotalLoss {
  double loss = 0.0;
  std::size_t contributing_pixels = 0;
  std::optional<LogitsTensor> seg_gradient;
  std::optional<LogitsTensor> edge_gradient;
};

/// Softmax cross-entropy averaged over the masked pixels (all pixels when no
/// mask is given). Accumulates in a fixed row-major order.
LossResult softmax_cross_entropy(const LogitsTensor& logits, const LabelMap& labels,
                                 const BinaryMask* mask, bool want_gradient);

/// Cross-entropy restricted to the edge band.
LossResult edge_attention_loss(const LogitsTensor& logits, const LabelMap& labels,
                               const BinaryMask& edge_mask, bool want_gradient);

/// Binary cross-entropy of a 1-channel edge logit map against a boundary map,
/// averaged over all pixels.
LossResult boundary_bce(const LogitsTensor& edge_logit, const BinaryMask& boundary_gt,
                        bool want_gradient);

/// seg + lambda_edge * edge_att + lambda_boundary * bnd. Absent terms
/// (nullptr) contribute nothing.
TotalLoss total_loss(const LossResult& seg, const LossResult* edge_att, const LossResult* bnd,
                     const LossWeights& weights, bool want_gradient);

}  // namespace eaparse
