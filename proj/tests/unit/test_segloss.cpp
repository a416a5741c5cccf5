#include <gtest/gtest.h>

#include <cmath>

#include "eaparse/boundary.hpp"
#include "eaparse/segloss.hpp"
#include "expect_errc.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace eaparse;

namespace {

constexpr double kH = 1e-3;
constexpr double kTol = 1e-4;

void expect_gradient_close(const LogitsTensor& analytic, const LogitsTensor& numeric) {
  ASSERT_TRUE(analytic.same_shape(numeric));
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    EXPECT_LE(oracle::relative_error(analytic.data()[i], numeric.data()[i]), kTol)
        << "entry " << i << ": " << analytic.data()[i] << " vs " << numeric.data()[i];
  }
}

BinaryMask nonempty_mask(Rng& rng, int h, int w) {
  BinaryMask m = synth::random_mask(rng, h, w, 0.4);
  if (count_set(m) == 0) m.at(0, 0) = 1;
  return m;
}

}  // namespace

TEST(SoftmaxCrossEntropy, UniformLogitsGiveLogC) {
  const LogitsTensor x(4, 3, 3, 0.25);
  Rng rng(1);
  const LabelMap y = synth::random_labels(rng, 3, 3, 4);
  const LossResult r = softmax_cross_entropy(x, y, nullptr, false);
  EXPECT_NEAR(r.loss, std::log(4.0), 1e-12);
  EXPECT_NEAR(r.loss, 1.3862944, 1e-7);
  EXPECT_EQ(r.contributing_pixels, 9u);
  EXPECT_FALSE(r.gradient.has_value());
}

TEST(SoftmaxCrossEntropy, SaturatedLogitsGiveNearZero) {
  Rng rng(2);
  const LabelMap y = synth::random_labels(rng, 4, 4, 3);
  LogitsTensor x(3, 4, 4, 0.0);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) x.at(y.at(r, c), r, c) = 100.0;
  }
  const LossResult res = softmax_cross_entropy(x, y, nullptr, false);
  EXPECT_GE(res.loss, 0.0);
  EXPECT_LT(res.loss, 1e-6);
}

TEST(SoftmaxCrossEntropy, MatchesDirectSum) {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const LogitsTensor x = synth::random_logits(rng, 3, 5, 5, 5.0);
    const LabelMap y = synth::random_labels(rng, 5, 5, 3);
    const BinaryMask m = nonempty_mask(rng, 5, 5);
    EXPECT_NEAR(softmax_cross_entropy(x, y, nullptr, false).loss,
                oracle::cross_entropy(x, y, oracle::all_pixels(5, 5)), 1e-12);
    EXPECT_NEAR(softmax_cross_entropy(x, y, &m, false).loss, oracle::cross_entropy(x, y, oracle::set_pixels(m)),
                1e-12);
  }
}

TEST(SoftmaxCrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const LogitsTensor x = synth::random_logits(rng, 3, 4, 4);
    const LabelMap y = synth::random_labels(rng, 4, 4, 3);
    const BinaryMask m = nonempty_mask(rng, 4, 4);
    const LossResult r = softmax_cross_entropy(x, y, &m, true);
    ASSERT_TRUE(r.gradient.has_value());
    const auto numeric = oracle::numeric_gradient(
        [&](const LogitsTensor& p) { return softmax_cross_entropy(p, y, &m, false).loss; }, x, kH);
    expect_gradient_close(*r.gradient, numeric);
  }
}

TEST(SoftmaxCrossEntropy, GradientChannelSumsVanish) {
  Rng rng(5);
  const LogitsTensor x = synth::random_logits(rng, 4, 6, 6);
  const LabelMap y = synth::random_labels(rng, 6, 6, 4);
  const BinaryMask m = nonempty_mask(rng, 6, 6);
  const LogitsTensor g = *softmax_cross_entropy(x, y, &m, true).gradient;
  EXPECT_TRUE(g.all_finite());
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      double sum = 0;
      double mag = 0;
      for (int k = 0; k < 4; ++k) {
        sum += g.at(k, r, c);
        mag += std::abs(g.at(k, r, c));
      }
      EXPECT_NEAR(sum, 0.0, 1e-15);
      if (!m.at(r, c)) EXPECT_EQ(mag, 0.0);
    }
  }
}

TEST(SoftmaxCrossEntropy, DisjointMasksCombineByCount) {
  Rng rng(6);
  const LogitsTensor x = synth::random_logits(rng, 3, 6, 6);
  const LabelMap y = synth::random_labels(rng, 6, 6, 3);
  BinaryMask a(6, 6, 0), b(6, 6, 0), both(6, 6, 0);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      const bool left = c < 2;
      const bool right = c >= 4;
      a.at(r, c) = left;
      b.at(r, c) = right;
      both.at(r, c) = left || right;
    }
  }
  const double la = softmax_cross_entropy(x, y, &a, false).loss;
  const double lb = softmax_cross_entropy(x, y, &b, false).loss;
  const double lab = softmax_cross_entropy(x, y, &both, false).loss;
  EXPECT_NEAR(24 * lab, 12 * la + 12 * lb, 1e-12);
}

TEST(SoftmaxCrossEntropy, Errors) {
  const LogitsTensor x(3, 2, 2, 0.0);
  EXPECT_ERRC(softmax_cross_entropy(x, LabelMap(2, 3, 0), nullptr, false), Errc::ShapeMismatch);
  EXPECT_ERRC(softmax_cross_entropy(x, LabelMap(2, 2, 3), nullptr, false), Errc::LabelOutOfRange);
  const BinaryMask empty(2, 2, 0);
  EXPECT_ERRC(softmax_cross_entropy(x, LabelMap(2, 2, 0), &empty, false), Errc::EmptyMask);
  const BinaryMask wrong(3, 2, 1);
  EXPECT_ERRC(softmax_cross_entropy(x, LabelMap(2, 2, 0), &wrong, false), Errc::ShapeMismatch);
}

TEST(EdgeAttentionLoss, FullMaskEqualsUnmasked) {
  Rng rng(7);
  const LogitsTensor x = synth::random_logits(rng, 3, 4, 5);
  const LabelMap y = synth::random_labels(rng, 4, 5, 3);
  const BinaryMask ones(4, 5, 1);
  const LossResult a = edge_attention_loss(x, y, ones, true);
  const LossResult b = softmax_cross_entropy(x, y, nullptr, true);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(*a.gradient, *b.gradient);
}

TEST(EdgeAttentionLoss, SinglePixelMask) {
  Rng rng(8);
  const LogitsTensor x = synth::random_logits(rng, 3, 4, 4);
  const LabelMap y = synth::random_labels(rng, 4, 4, 3);
  BinaryMask m(4, 4, 0);
  m.at(2, 1) = 1;
  const LossResult r = edge_attention_loss(x, y, m, false);
  EXPECT_EQ(r.contributing_pixels, 1u);
  EXPECT_NEAR(r.loss, oracle::cross_entropy(x, y, {{2, 1}}), 1e-12);
}

TEST(EdgeAttentionLoss, MatchesCoordinateSumOnEdgeBand) {
  Rng rng(9);
  const LogitsTensor x = synth::random_logits(rng, 3, 5, 5);
  const LabelMap y = synth::random_labels(rng, 5, 5, 3);
  const BinaryMask band = oracle::dilate(oracle::boundary(y), 1);
  EXPECT_NEAR(edge_attention_loss(x, y, band, false).loss, oracle::cross_entropy(x, y, oracle::set_pixels(band)),
              1e-12);
}

TEST(EdgeAttentionLoss, EmptyBandIsAnError) {
  EXPECT_ERRC(edge_attention_loss(LogitsTensor(2, 3, 3), LabelMap(3, 3, 1), BinaryMask(3, 3, 0), false),
              Errc::EmptyMask);
}

TEST(BoundaryBce, ZeroLogitsGiveLogTwo) {
  Rng rng(10);
  const BinaryMask y = synth::random_mask(rng, 4, 4);
  EXPECT_NEAR(boundary_bce(LogitsTensor(1, 4, 4, 0.0), y, false).loss, 0.6931472, 1e-7);
}

TEST(BoundaryBce, SaturatedPositive) {
  EXPECT_LT(boundary_bce(LogitsTensor(1, 3, 3, 100.0), BinaryMask(3, 3, 1), false).loss, 1e-6);
}

TEST(BoundaryBce, MatchesOracleAndFiniteDifferences) {
  Rng rng(11);
  for (int i = 0; i < 10; ++i) {
    const LogitsTensor x = synth::random_logits(rng, 1, 4, 4, 6.0);
    const BinaryMask y = synth::random_mask(rng, 4, 4);
    const LossResult r = boundary_bce(x, y, true);
    EXPECT_NEAR(r.loss, oracle::binary_cross_entropy(x, y), 1e-12);
    const auto numeric =
        oracle::numeric_gradient([&](const LogitsTensor& p) { return boundary_bce(p, y, false).loss; }, x, kH);
    expect_gradient_close(*r.gradient, numeric);
  }
}

TEST(BoundaryBce, ExtremeLogitsStayFinite) {
  LogitsTensor x(1, 1, 2, 0.0);
  x.at(0, 0, 0) = 800.0;
  x.at(0, 0, 1) = -800.0;
  const LossResult r = boundary_bce(x, BinaryMask(1, 2, {0, 1}), true);
  EXPECT_NEAR(r.loss, 800.0, 1e-9);
  EXPECT_TRUE(r.gradient->all_finite());
}

TEST(BoundaryBce, Errors) {
  EXPECT_ERRC(boundary_bce(LogitsTensor(2, 2, 2), BinaryMask(2, 2, 0), false), Errc::ShapeMismatch);
  EXPECT_ERRC(boundary_bce(LogitsTensor(1, 2, 2), BinaryMask(2, 3, 0), false), Errc::ShapeMismatch);
}

TEST(TotalLoss, ZeroWeightsReduceToSegmentation) {
  Rng rng(12);
  const LogitsTensor x = synth::random_logits(rng, 3, 4, 4);
  const LabelMap y = synth::random_labels(rng, 4, 4, 3);
  const LossResult seg = softmax_cross_entropy(x, y, nullptr, true);
  const LossResult att = edge_attention_loss(x, y, edge_attention_mask(y, StructuringRadius(1)), true);
  const LossResult bnd = boundary_bce(synth::random_logits(rng, 1, 4, 4), extract_boundary(y), true);
  const TotalLoss t = total_loss(seg, &att, &bnd, LossWeights{0.0, 0.0}, true);
  EXPECT_EQ(t.loss, seg.loss);
  EXPECT_EQ(*t.seg_gradient, *seg.gradient);
}

TEST(TotalLoss, FullEdgeMaskDoublesSegmentation) {
  Rng rng(13);
  const LogitsTensor x = synth::random_logits(rng, 3, 4, 4);
  const LabelMap y = synth::random_labels(rng, 4, 4, 3);
  const LossResult seg = softmax_cross_entropy(x, y, nullptr, true);
  const LossResult att = edge_attention_loss(x, y, BinaryMask(4, 4, 1), true);
  const TotalLoss t = total_loss(seg, &att, nullptr, LossWeights{1.0, 1.0}, true);
  EXPECT_EQ(t.loss, 2.0 * seg.loss);
}

TEST(TotalLoss, CombinedGradientMatchesFiniteDifferences) {
  Rng rng(14);
  const LossWeights w{0.7, 1.3};
  for (int i = 0; i < 5; ++i) {
    const LogitsTensor x = synth::random_logits(rng, 4, 5, 5);
    const LogitsTensor e = synth::random_logits(rng, 1, 5, 5);
    const LabelMap y = synth::random_labels(rng, 5, 5, 4);
    const BinaryMask band = edge_attention_mask(y, StructuringRadius(1));
    const BinaryMask bgt = extract_boundary(y);
    auto scalar = [&](const LogitsTensor& seg_logits, const LogitsTensor& edge_logits) {
      const LossResult s = softmax_cross_entropy(seg_logits, y, nullptr, false);
      const LossResult a = edge_attention_loss(seg_logits, y, band, false);
      const LossResult b = boundary_bce(edge_logits, bgt, false);
      return total_loss(s, &a, &b, w, false).loss;
    };
    const LossResult s = softmax_cross_entropy(x, y, nullptr, true);
    const LossResult a = edge_attention_loss(x, y, band, true);
    const LossResult b = boundary_bce(e, bgt, true);
    const TotalLoss t = total_loss(s, &a, &b, w, true);
    EXPECT_NEAR(t.loss, scalar(x, e), 1e-15);
    expect_gradient_close(*t.seg_gradient,
                          oracle::numeric_gradient([&](const LogitsTensor& p) { return scalar(p, e); }, x, kH));
    expect_gradient_close(*t.edge_gradient,
                          oracle::numeric_gradient([&](const LogitsTensor& p) { return scalar(x, p); }, e, kH));
  }
}

TEST(TotalLoss, Errors) {
  Rng rng(15);
  const LogitsTensor x = synth::random_logits(rng, 3, 4, 4);
  const LabelMap y = synth::random_labels(rng, 4, 4, 3);
  const LossResult with = softmax_cross_entropy(x, y, nullptr, true);
  const LossResult without = softmax_cross_entropy(x, y, nullptr, false);
  EXPECT_ERRC(total_loss(without, nullptr, nullptr, LossWeights{}, true), Errc::MissingGradient);
  EXPECT_ERRC(total_loss(with, &without, nullptr, LossWeights{}, true), Errc::MissingGradient);
  const LossResult other = softmax_cross_entropy(synth::random_logits(rng, 3, 5, 4), LabelMap(5, 4, 0), nullptr, true);
  EXPECT_ERRC(total_loss(with, &other, nullptr, LossWeights{}, true), Errc::ShapeMismatch);
  EXPECT_ERRC(LossWeights({-1.0, 1.0}).validate(), Errc::InvalidArgument);
  EXPECT_ERRC(LossWeights({1.0, std::nan("")}).validate(), Errc::InvalidArgument);
}
