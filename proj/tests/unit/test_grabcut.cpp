#include <gtest/gtest.h>

#include "eaparse/boundary.hpp"
#include "eaparse/grabcut.hpp"
#include "expect_errc.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace eaparse;

namespace {

BinaryMask state_mask(const Trimap& t, TrimapState s) {
  BinaryMask m(t.height(), t.width(), 0);
  for (int r = 0; r < t.height(); ++r) {
    for (int c = 0; c < t.width(); ++c) m.at(r, c) = trimap_state(t, r, c) == s;
  }
  return m;
}

BinaryMask centered_square(int n, int side) {
  BinaryMask m(n, n, 0);
  const int lo = (n - side) / 2;
  for (int r = lo; r < lo + side; ++r) {
    for (int c = lo; c < lo + side; ++c) m.at(r, c) = 1;
  }
  return m;
}

double jaccard(const BinaryMask& a, const BinaryMask& b) { return *oracle::jaccard(a, b); }

}  // namespace

TEST(BuildTrimap, SquareWithSmallRadii) {
  const BinaryMask init = centered_square(20, 10);
  GrabcutParams p;
  p.erode_radius = 1;
  p.dilate_radius = 2;
  const Trimap t = build_trimap(init, p);
  const BinaryMask fg = state_mask(t, TrimapState::DefiniteFG);
  EXPECT_EQ(fg, centered_square(20, 8));
  EXPECT_EQ(fg, oracle::erode(init, 1));

  // Disk dilation cuts the corners of the 14x14 envelope.
  const BinaryMask grown = oracle::dilate(init, 2);
  BinaryMask expected_bg(20, 20, 0);
  for (std::size_t i = 0; i < grown.data().size(); ++i) expected_bg.data()[i] = !grown.data()[i];
  EXPECT_EQ(state_mask(t, TrimapState::DefiniteBG), expected_bg);
  int r_min = 20, r_max = -1;
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) {
      if (!expected_bg.at(r, c)) {
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
      }
    }
  }
  EXPECT_EQ(r_min, 3);
  EXPECT_EQ(r_max, 16);

  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) {
      const auto s = trimap_state(t, r, c);
      if (s == TrimapState::ProbableFG) EXPECT_TRUE(init.at(r, c) && !fg.at(r, c));
      if (s == TrimapState::ProbableBG) EXPECT_TRUE(!init.at(r, c) && grown.at(r, c));
    }
  }
}

TEST(BuildTrimap, ZeroRadiiHaveNoProbableBand) {
  const BinaryMask init = centered_square(9, 3);
  GrabcutParams p;
  p.erode_radius = 0;
  p.dilate_radius = 0;
  const Trimap t = build_trimap(init, p);
  EXPECT_EQ(state_mask(t, TrimapState::DefiniteFG), init);
  EXPECT_EQ(count_set(state_mask(t, TrimapState::ProbableFG)), 0u);
  EXPECT_EQ(count_set(state_mask(t, TrimapState::ProbableBG)), 0u);
}

TEST(BuildTrimap, ErosionFallbackKeepsInit) {
  const BinaryMask init = centered_square(9, 2);
  GrabcutParams p;
  p.erode_radius = 3;
  EXPECT_EQ(state_mask(build_trimap(init, p), TrimapState::DefiniteFG), init);
}

TEST(BuildTrimap, DegenerateMasks) {
  EXPECT_ERRC(build_trimap(BinaryMask(4, 4, 1), GrabcutParams{}), Errc::DegenerateMask);
  EXPECT_ERRC(build_trimap(BinaryMask(4, 4, 0), GrabcutParams{}), Errc::DegenerateMask);
}

TEST(SmoothnessBeta, ConstantImageGivesZero) {
  EXPECT_EQ(smoothness_beta(RgbImage(5, 5, 77)), 0.0);
}

TEST(SmoothnessBeta, TwoPixelImage) {
  RgbImage img(1, 2, 0);
  img.at(0, 1, 0) = 3;
  img.at(0, 1, 1) = 4;
  // One pair with squared difference 25.
  EXPECT_DOUBLE_EQ(smoothness_beta(img), 1.0 / 50.0);
}

TEST(GrabcutRefine, FillsTheHole) {
  const auto inst = synth::disk_with_hole(1);
  const GrabcutResult r = grabcut_refine(inst.image, inst.init, GrabcutParams{});
  EXPECT_GE(jaccard(r.refined, inst.truth), 0.99);
  ASSERT_EQ(r.energy_trace.size(), 5u);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) EXPECT_LE(r.energy_trace[i], r.energy_trace[i - 1]);
}

TEST(GrabcutRefine, DefiniteRegionsAreRespected) {
  const auto inst = synth::disk_with_hole(2, 40);
  GrabcutParams p;
  p.erode_radius = 2;
  p.dilate_radius = 4;
  p.gamma = 5;
  const Trimap t = build_trimap(inst.init, p);
  const GrabcutResult r = grabcut_refine(inst.image, inst.init, p);
  for (int row = 0; row < 32; ++row) {
    for (int c = 0; c < 32; ++c) {
      if (trimap_state(t, row, c) == TrimapState::DefiniteFG) EXPECT_EQ(r.refined.at(row, c), 1);
      if (trimap_state(t, row, c) == TrimapState::DefiniteBG) EXPECT_EQ(r.refined.at(row, c), 0);
    }
  }
}

TEST(GrabcutRefine, SeparatedRegionIsFixedPoint) {
  const auto inst = synth::disk_with_hole(3);
  GrabcutParams p;
  p.iterations = 1;
  EXPECT_EQ(grabcut_refine(inst.image, inst.truth, p).refined, inst.truth);
}

TEST(GrabcutRefine, EnergyNonIncreasingOnNoisyInstances) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(seed);
    const auto inst = synth::disk_with_hole(seed, 60);
    GrabcutParams p;
    p.rng_seed = seed;
    p.iterations = 6;
    p.gamma = 10.0 + 10.0 * static_cast<double>(seed);
    const GrabcutResult r = grabcut_refine(synth::random_image(rng, 32, 32), inst.init, p);
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
      EXPECT_LE(r.energy_trace[i], r.energy_trace[i - 1]) << "seed " << seed << " iteration " << i;
    }
  }
}

TEST(GrabcutRefine, DeterministicForSeed) {
  const auto inst = synth::disk_with_hole(4, 30);
  GrabcutParams p;
  p.rng_seed = 1234;
  const GrabcutResult a = grabcut_refine(inst.image, inst.init, p);
  const GrabcutResult b = grabcut_refine(inst.image, inst.init, p);
  EXPECT_EQ(a.refined, b.refined);
  EXPECT_EQ(a.energy_trace, b.energy_trace);
}

TEST(GrabcutRefine, ConstantImageStillRuns) {
  const BinaryMask init = centered_square(12, 6);
  const GrabcutResult r = grabcut_refine(RgbImage(12, 12, 128), init, GrabcutParams{});
  EXPECT_EQ(r.energy_trace.size(), 5u);
}

TEST(GrabcutRefine, Errors) {
  EXPECT_ERRC(grabcut_refine(RgbImage(4, 4), centered_square(5, 2), GrabcutParams{}), Errc::ShapeMismatch);
  EXPECT_ERRC(grabcut_refine(RgbImage(4, 4), BinaryMask(4, 4, 0), GrabcutParams{}), Errc::DegenerateMask);
  GrabcutParams bad;
  bad.iterations = 0;
  EXPECT_ERRC(bad.validate(), Errc::InvalidArgument);
  bad = GrabcutParams{};
  bad.gamma = -1;
  EXPECT_ERRC(bad.validate(), Errc::InvalidArgument);
  bad = GrabcutParams{};
  bad.components_k = 0;
  EXPECT_ERRC(bad.validate(), Errc::InvalidArgument);
}

TEST(RefineClass, HolePixelsJoinTheClass) {
  const auto inst = synth::disk_with_hole(5);
  LabelMap labels(32, 32, 0);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      if (inst.init.at(r, c)) labels.at(r, c) = 7;
    }
  }
  labels.at(0, 0) = 3;
  const LabelMap out = refine_class(labels, inst.image, 7, GrabcutParams{});
  for (int r = 13; r <= 18; ++r) {
    for (int c = 13; c <= 18; ++c) EXPECT_EQ(out.at(r, c), 7);
  }
  EXPECT_EQ(out.at(0, 0), 3);
}

TEST(RefineClass, OptimalMaskUnchanged) {
  const auto inst = synth::disk_with_hole(6);
  LabelMap labels(32, 32, 2);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      if (inst.truth.at(r, c)) labels.at(r, c) = 9;
    }
  }
  EXPECT_EQ(refine_class(labels, inst.image, 9, GrabcutParams{}), labels);
}

TEST(RefineClass, AbsentClass) {
  EXPECT_ERRC(refine_class(LabelMap(4, 4, 1), RgbImage(4, 4), 2, GrabcutParams{}), Errc::ClassAbsent);
}
