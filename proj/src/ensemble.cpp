#include "eaparse/ensemble.hpp"

#include <string>
#include <vector>

namespace eaparse {

ProbTensor softmax_map(const LogitsTensor& logits) {
  ProbTensor out(logits.channels(), logits.height(), logits.width());
  const std::size_t plane = logits.plane_size();
  const auto in = logits.data();
  auto dst = out.data();
  const auto channels = static_cast<std::size_t>(logits.channels());
  for (std::size_t p = 0; p < plane; ++p) {
    double max_v = in[p];
    for (std::size_t c = 1; c < channels; ++c) max_v = std::max(max_v, in[c * plane + p]);
    double denom = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const double e = std::exp(in[c * plane + p] - max_v);
      dst[c * plane + p] = e;
      denom += e;
    }
    for (std::size_t c = 0; c < channels; ++c) dst[c * plane + p] /= denom;
  }
  return out;
}

LabelMap ensemble_argmax(std::span<const LogitsTensor> inputs, int target_h, int target_w) {
  if (inputs.empty()) fail(Errc::EmptyInput, "ensemble needs at least one model");
  const int channels = inputs.front().channels();
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    if (inputs[i].channels() != channels) {
      fail(Errc::ChannelMismatch, "model " + std::to_string(i) + " has " +
                                      std::to_string(inputs[i].channels()) + " channels, model 0 has " +
                                      std::to_string(channels));
    }
  }
  ProbTensor mean(channels, target_h, target_w, 0.0);
  for (const auto& logits : inputs) {
    const ProbTensor probs = resize_bilinear(softmax_map(logits), target_h, target_w);
    auto acc = mean.data();
    const auto src = probs.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
  }
  const double inv = 1.0 / static_cast<double>(inputs.size());
  for (auto& v : mean.data()) v *= inv;
  return argmax_labels(mean);
}

}  // namespace eaparse
