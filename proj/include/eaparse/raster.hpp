#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eaparse/error.hpp"

namespace eaparse {

/// Row-major 8-bit raster with a fixed channel count. The tag parameter keeps
/// label maps, binary masks and trimaps from being mixed up at compile time.
/// A default-constructed raster is empty (0x0) and is rejected by writers.
template <typename Tag, int Channels>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster() = default;

  Raster(int height, int width, std::uint8_t fill = 0) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(pixel_count() * Channels, fill);
  }

  Raster(int height, int width, std::vector<std::uint8_t> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != pixel_count() * Channels) {
      fail(Errc::InvalidShape, "raster payload has " + std::to_string(data_.size()) +
                                   " bytes, expected " +
                                   std::to_string(pixel_count() * Channels));
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::uint8_t& at(int r, int c, int ch = 0) { return data_[index(r, c, ch)]; }
  std::uint8_t at(int r, int c, int ch = 0) const { return data_[index(r, c, ch)]; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return data_; }

  bool same_shape(int height, int width) const noexcept {
    return height_ == height && width_ == width;
  }
  template <typename OtherTag, int OtherChannels>
  bool same_shape(const Raster<OtherTag, OtherChannels>& other) const noexcept {
    return same_shape(other.height(), other.width());
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
      fail(Errc::InvalidShape, "raster dimensions must be positive, got " +
                                   std::to_string(height) + "x" + std::to_string(width));
    }
  }
  std::size_t index(int r, int c, int ch) const noexcept {
    return (static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(c)) * Channels + static_cast<std::size_t>(ch);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

struct LabelTag {};
struct MaskTag {};
struct RgbTag {};

/// Per-pixel class ids, 0 = background.
using LabelMap = Raster<LabelTag, 1>;
/// Values restricted to {0,1}.
using BinaryMask = Raster<MaskTag, 1>;
/// Interleaved R,G,B bytes.
using RgbImage = Raster<RgbTag, 3>;

/// Throws InvalidMaskValue unless every element is 0 or 1.
void validate_mask(const BinaryMask& mask);

std::size_t count_set(const BinaryMask& mask) noexcept;

/// Channel-major (c, row, col) real-valued tensor. Values are held in double
/// precision in memory; the on-disk container stores float32.
template <typename Tag>
class Tensor3 {
 public:
  Tensor3() = default;

  Tensor3(int channels, int height, int width, double fill = 0.0)
      : channels_(channels), height_(height), width_(width) {
    check_dims(channels, height, width);
    data_.assign(size(), fill);
  }

  Tensor3(int channels, int height, int width, std::vector<double> data)
      : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
    check_dims(channels, height, width);
    if (data_.size() != size()) {
      fail(Errc::InvalidShape, "tensor payload has " + std::to_string(data_.size()) +
                                   " values, expected " + std::to_string(size()));
    }
  }

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return plane_size() * static_cast<std::size_t>(channels_); }

  double& at(int c, int r, int col) { return data_[index(c, r, col)]; }
  double at(int c, int r, int col) const { return data_[index(c, r, col)]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> plane(int c) const noexcept {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                                  plane_size());
  }
  std::span<double> plane(int c) noexcept {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                            plane_size());
  }

  bool same_shape(const Tensor3& other) const noexcept {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }

  bool all_finite() const noexcept {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  static void check_dims(int channels, int height, int width) {
    if (channels < 1 || height < 1 || width < 1) {
      fail(Errc::InvalidShape, "tensor dimensions must be positive, got " +
                                   std::to_string(channels) + "x" + std::to_string(height) +
                                   "x" + std::to_string(width));
    }
  }
  std::size_t index(int c, int r, int col) const noexcept {
    return static_cast<std::size_t>(c) * plane_size() +
           static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

struct LogitsTag {};
struct ProbTag {};

using LogitsTensor = Tensor3<LogitsTag>;
/// Per-pixel channel vectors are probability distributions.
using ProbTensor = Tensor3<ProbTag>;

}  // namespace eaparse
