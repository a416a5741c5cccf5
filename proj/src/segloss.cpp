#include "eaparse/segloss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace eaparse {

void LossWeights::validate() const {
  if (!std::isfinite(lambda_edge) || lambda_edge < 0.0 || !std::isfinite(lambda_boundary) ||
      lambda_boundary < 0.0) {
    fail(Errc::InvalidArgument, "loss weights must be finite and non-negative");
  }
}

LossResult softmax_cross_entropy(const LogitsTensor& logits, const LabelMap& labels,
                                 const BinaryMask* mask, bool want_gradient) {
  if (!labels.same_shape(logits.height(), logits.width())) {
    fail(Errc::ShapeMismatch, "logits are " + std::to_string(logits.height()) + "x" +
                                  std::to_string(logits.width()) + ", labels are " +
                                  std::to_string(labels.height()) + "x" +
                                  std::to_string(labels.width()));
  }
  if (mask != nullptr && !mask->same_shape(labels)) {
    fail(Errc::ShapeMismatch, "mask shape differs from labels");
  }
  const int channels = logits.channels();
  const std::size_t plane = logits.plane_size();
  const auto label_data = labels.data();
  for (std::size_t p = 0; p < plane; ++p) {
    if (label_data[p] >= channels) {
      fail(Errc::LabelOutOfRange, "label " + std::to_string(label_data[p]) + " at flat index " +
                                      std::to_string(p) + " but only " +
                                      std::to_string(channels) + " channels");
    }
  }

  std::size_t count = plane;
  if (mask != nullptr) {
    count = count_set(*mask);
    if (count == 0) fail(Errc::EmptyMask, "loss mask selects no pixels");
  }

  LossResult result;
  result.contributing_pixels = count;
  if (want_gradient) result.gradient.emplace(channels, logits.height(), logits.width(), 0.0);

  const auto values = logits.data();
  const double inv_count = 1.0 / static_cast<double>(count);
  std::vector<double> probs(static_cast<std::size_t>(channels));
  double sum = 0.0;
  for (std::size_t p = 0; p < plane; ++p) {
    if (mask != nullptr && mask->data()[p] == 0) continue;
    double max_logit = values[p];
    for (int c = 1; c < channels; ++c) {
      max_logit = std::max(max_logit, values[static_cast<std::size_t>(c) * plane + p]);
    }
    double denom = 0.0;
    for (int c = 0; c < channels; ++c) {
      const double e = std::exp(values[static_cast<std::size_t>(c) * plane + p] - max_logit);
      probs[static_cast<std::size_t>(c)] = e;
      denom += e;
    }
    const int target = label_data[p];
    const double target_shifted = values[static_cast<std::size_t>(target) * plane + p] - max_logit;
    sum += std::log(denom) - target_shifted;
    if (want_gradient) {
      auto grad = result.gradient->data();
      for (int c = 0; c < channels; ++c) {
        const double prob = probs[static_cast<std::size_t>(c)] / denom;
        grad[static_cast<std::size_t>(c) * plane + p] =
            (prob - (c == target ? 1.0 : 0.0)) * inv_count;
      }
    }
  }
  result.loss = std::max(0.0, sum * inv_count);
  return result;
}

LossResult edge_attention_loss(const LogitsTensor& logits, const LabelMap& labels,
                               const BinaryMask& edge_mask, bool want_gradient) {
  return softmax_cross_entropy(logits, labels, &edge_mask, want_gradient);
}

LossResult boundary_bce(const LogitsTensor& edge_logit, const BinaryMask& boundary_gt,
                        bool want_gradient) {
  if (edge_logit.channels() != 1) {
    fail(Errc::ShapeMismatch, "edge logits must have 1 channel, got " +
                                  std::to_string(edge_logit.channels()));
  }
  if (!boundary_gt.same_shape(edge_logit.height(), edge_logit.width())) {
    fail(Errc::ShapeMismatch, "boundary map shape differs from edge logits");
  }
  const std::size_t n = edge_logit.plane_size();
  const double inv_n = 1.0 / static_cast<double>(n);
  LossResult result;
  result.contributing_pixels = n;
  if (want_gradient) result.gradient.emplace(1, edge_logit.height(), edge_logit.width(), 0.0);

  const auto x = edge_logit.data();
  const auto y = boundary_gt.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = y[i] != 0 ? 1.0 : 0.0;
    sum += std::max(x[i], 0.0) - x[i] * target + std::log1p(std::exp(-std::abs(x[i])));
    if (want_gradient) {
      // Branches keep exp() from overflowing for large |x|.
      const double sigmoid =
          x[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-x[i])) : std::exp(x[i]) / (1.0 + std::exp(x[i]));
      result.gradient->data()[i] = (sigmoid - target) * inv_n;
    }
  }
  result.loss = std::max(0.0, sum * inv_n);
  return result;
}

TotalLoss total_loss(const LossResult& seg, const LossResult* edge_att, const LossResult* bnd,
                     const LossWeights& weights, bool want_gradient) {
  weights.validate();
  TotalLoss total;
  total.contributing_pixels = seg.contributing_pixels;
  total.loss = seg.loss;
  if (edge_att != nullptr) total.loss += weights.lambda_edge * edge_att->loss;
  if (bnd != nullptr) total.loss += weights.lambda_boundary * bnd->loss;
  if (!want_gradient) return total;

  if (!seg.gradient || (edge_att != nullptr && !edge_att->gradient) ||
      (bnd != nullptr && !bnd->gradient)) {
    fail(Errc::MissingGradient, "gradient requested but an input loss carries none");
  }
  total.seg_gradient = *seg.gradient;
  if (edge_att != nullptr) {
    if (!edge_att->gradient->same_shape(*seg.gradient)) {
      fail(Errc::ShapeMismatch, "edge-attention gradient shape differs from segmentation gradient");
    }
    auto out = total.seg_gradient->data();
    const auto add = edge_att->gradient->data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights.lambda_edge * add[i];
  }
  if (bnd != nullptr) {
    total.edge_gradient = *bnd->gradient;
    for (auto& v : total.edge_gradient->data()) v *= weights.lambda_boundary;
  }
  return total;
}

}  // namespace eaparse
