#include <gtest/gtest.h>

#include <cstring>
#include <string>

#include "eaparse/tensorio.hpp"
#include "expect_errc.hpp"
#include "synth.hpp"

using namespace eaparse;
namespace ti = eaparse::tensorio;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload = {}) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> fplt(std::uint32_t version, std::uint32_t c, std::uint32_t h, std::uint32_t w,
                               const std::vector<float>& values, const char* magic = "FPLT") {
  std::vector<std::uint8_t> out(magic, magic + 4);
  for (std::uint32_t v : {version, c, h, w}) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  for (float f : values) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  return out;
}

}  // namespace

TEST(LabelMapFormat, DecodesTwoByTwo) {
  const LabelMap m = ti::decode_label_map(bytes_of("P5\n2 2\n255\n", {0, 1, 2, 3}));
  ASSERT_EQ(m.height(), 2);
  ASSERT_EQ(m.width(), 2);
  EXPECT_EQ(m.at(0, 0), 0);
  EXPECT_EQ(m.at(0, 1), 1);
  EXPECT_EQ(m.at(1, 0), 2);
  EXPECT_EQ(m.at(1, 1), 3);
}

TEST(LabelMapFormat, EncodesExactBytes) {
  EXPECT_EQ(ti::encode_label_map(LabelMap(1, 1, 7)), bytes_of("P5\n1 1\n255\n", {7}));
  const LabelMap wide(2, 3, 9);
  EXPECT_EQ(ti::encode_label_map(wide), bytes_of("P5\n3 2\n255\n", {9, 9, 9, 9, 9, 9}));
}

TEST(LabelMapFormat, RoundTripsRandomMaps) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const LabelMap m = synth::random_labels(rng, 8, 8, 256);
    const auto bytes = ti::encode_label_map(m);
    const LabelMap back = ti::decode_label_map(bytes);
    EXPECT_EQ(back, m);
    EXPECT_EQ(ti::encode_label_map(back), bytes);
  }
}

TEST(LabelMapFormat, RejectsBadHeaders) {
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n1 1\n65535\n", {0, 0})), Errc::UnsupportedMaxval);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P6\n1 1\n255\n", {0})), Errc::MalformedHeader);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n# hi\n1 1\n255\n", {0})), Errc::MalformedHeader);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n1 x\n255\n", {0})), Errc::MalformedHeader);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n0 1\n255\n")), Errc::MalformedHeader);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n1 1\n255")), Errc::MalformedHeader);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("")), Errc::MalformedHeader);
}

TEST(LabelMapFormat, RejectsWrongPayloadSize) {
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n2 2\n255\n", {0, 1, 2})), Errc::TruncatedData);
  EXPECT_ERRC(ti::decode_label_map(bytes_of("P5\n1 1\n255\n", {0, 1})), Errc::TrailingData);
}

TEST(LabelMapFormat, AcceptsWhitespaceRunsBetweenFields) {
  const LabelMap m = ti::decode_label_map(bytes_of("P5 \t1\n\n1  255\n", {5}));
  EXPECT_EQ(m.at(0, 0), 5);
}

TEST(LabelMapFormat, EmptyMapIsRejectedBeforeWrite) {
  const auto dir = synth::temp_dir("tensorio");
  EXPECT_ERRC(ti::write_label_map(LabelMap(), dir / "empty.pgm"), Errc::InvalidShape);
  EXPECT_FALSE(std::filesystem::exists(dir / "empty.pgm"));
  EXPECT_ERRC(LabelMap(0, 0), Errc::InvalidShape);
}

TEST(LabelMapFormat, FileRoundTripAndIoFailure) {
  const auto dir = synth::temp_dir("tensorio");
  Rng rng(3);
  const LabelMap m = synth::random_labels(rng, 5, 7, 10);
  ti::write_label_map(m, dir / "m.pgm");
  EXPECT_EQ(ti::read_label_map(dir / "m.pgm"), m);
  EXPECT_ERRC(ti::read_label_map(dir / "missing.pgm"), Errc::IoFailure);
  EXPECT_ERRC(ti::write_label_map(m, dir / "no" / "such" / "dir.pgm"), Errc::IoFailure);
}

TEST(MaskFormat, RejectsValuesOutsideZeroOne) {
  EXPECT_ERRC(ti::decode_mask(bytes_of("P5\n2 1\n255\n", {0, 2})), Errc::InvalidMaskValue);
  const BinaryMask m = ti::decode_mask(bytes_of("P5\n2 1\n255\n", {0, 1}));
  EXPECT_EQ(m.at(0, 1), 1);
}

TEST(RgbFormat, DecodesSingleRedPixel) {
  const RgbImage img = ti::decode_rgb_image(bytes_of("P6\n1 1\n255\n", {255, 0, 0}));
  EXPECT_EQ(img.at(0, 0, 0), 255);
  EXPECT_EQ(img.at(0, 0, 1), 0);
  EXPECT_EQ(img.at(0, 0, 2), 0);
}

TEST(RgbFormat, RoundTripsRandomImages) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const RgbImage img = synth::random_image(rng, 4, 4);
    const auto bytes = ti::encode_rgb_image(img);
    EXPECT_EQ(ti::decode_rgb_image(bytes), img);
    EXPECT_EQ(ti::encode_rgb_image(ti::decode_rgb_image(bytes)), bytes);
  }
}

TEST(RgbFormat, RejectsGraymapMagicAndShortPayload) {
  EXPECT_ERRC(ti::decode_rgb_image(bytes_of("P5\n1 1\n255\n", {0})), Errc::MalformedHeader);
  EXPECT_ERRC(ti::decode_rgb_image(bytes_of("P6\n1 1\n255\n", {0, 0})), Errc::TruncatedData);
}

TEST(LogitsFormat, EncodesUnitZeroTensor) {
  const auto bytes = ti::encode_logits(LogitsTensor(1, 1, 1, 0.0));
  ASSERT_EQ(bytes.size(), ti::kLogitsHeaderBytes + 4);
  EXPECT_EQ(bytes, fplt(1, 1, 1, 1, {0.0f}));
  for (std::size_t i = ti::kLogitsHeaderBytes; i < bytes.size(); ++i) EXPECT_EQ(bytes[i], 0);
}

TEST(LogitsFormat, LayoutIsChannelMajor) {
  const LogitsTensor t = ti::decode_logits(fplt(1, 2, 1, 2, {1, 2, 3, 4}));
  EXPECT_EQ(t.at(0, 0, 0), 1);
  EXPECT_EQ(t.at(0, 0, 1), 2);
  EXPECT_EQ(t.at(1, 0, 0), 3);
  EXPECT_EQ(t.at(1, 0, 1), 4);
}

TEST(LogitsFormat, RoundTripsRandomTensors) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const LogitsTensor t = synth::random_logits(rng, 3, 4, 4, 50.0);
    const auto bytes = ti::encode_logits(t);
    const LogitsTensor back = ti::decode_logits(bytes);
    EXPECT_EQ(ti::encode_logits(back), bytes);
    // Values are stored as float32.
    for (std::size_t k = 0; k < t.size(); ++k) {
      EXPECT_EQ(back.data()[k], static_cast<double>(static_cast<float>(t.data()[k])));
    }
    EXPECT_EQ(ti::decode_logits(ti::encode_logits(back)), back);
  }
}

TEST(LogitsFormat, RejectsMalformedContainers) {
  EXPECT_ERRC(ti::decode_logits(fplt(1, 1, 1, 1, {0}, "XPLT")), Errc::BadMagic);
  EXPECT_ERRC(ti::decode_logits(fplt(2, 1, 1, 1, {0})), Errc::BadVersion);
  EXPECT_ERRC(ti::decode_logits(fplt(1, 1, 2, 2, {0, 0, 0})), Errc::TruncatedData);
  EXPECT_ERRC(ti::decode_logits(fplt(1, 1, 1, 1, {0, 0})), Errc::TrailingData);
  EXPECT_ERRC(ti::decode_logits(fplt(1, 0, 1, 1, {})), Errc::InvalidShape);
  EXPECT_ERRC(ti::decode_logits(fplt(1, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, {0})), Errc::InvalidShape);
  auto header_only = fplt(1, 1, 1, 1, {});
  header_only.resize(10);
  EXPECT_ERRC(ti::decode_logits(header_only), Errc::TruncatedData);
}

TEST(LogitsFormat, RejectsNonFiniteValues) {
  EXPECT_ERRC(ti::decode_logits(fplt(1, 1, 1, 2, {0.0f, std::numeric_limits<float>::quiet_NaN()})),
              Errc::NonFiniteValue);
  EXPECT_ERRC(ti::decode_logits(fplt(1, 1, 1, 1, {std::numeric_limits<float>::infinity()})),
              Errc::NonFiniteValue);
  EXPECT_ERRC(ti::encode_logits(LogitsTensor(1, 1, 1, 1e300)), Errc::NonFiniteValue);
}
