#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eaparse/raster.hpp"

namespace eaparse::tensorio {

// Binary netpbm rasters. Headers are exactly "P5\n{W} {H}\n255\n" (or P6) on
// write; readers accept any whitespace run between header tokens, a single
// whitespace byte after maxval, and reject '#' comments.

std::vector<std::uint8_t> encode_label_map(const LabelMap& map);
LabelMap decode_label_map(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_mask(const BinaryMask& mask);
/// Like decode_label_map, additionally rejecting values outside {0,1}.
BinaryMask decode_mask(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_rgb_image(const RgbImage& image);
RgbImage decode_rgb_image(std::span<const std::uint8_t> bytes);

/// "FPLT" container: magic, then version, C, H, W as little-endian u32, then
/// C*H*W little-endian float32 values in channel-major order.
inline constexpr std::uint32_t kLogitsVersion = 1;
inline constexpr std::size_t kLogitsHeaderBytes = 20;

std::vector<std::uint8_t> encode_logits(const LogitsTensor& tensor);
LogitsTensor decode_logits(std::span<const std::uint8_t> bytes);

LabelMap read_label_map(const std::filesystem::path& path);
void write_label_map(const LabelMap& map, const std::filesystem::path& path);

BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

RgbImage read_rgb_image(const std::filesystem::path& path);
void write_rgb_image(const RgbImage& image, const std::filesystem::path& path);

LogitsTensor read_logits(const std::filesystem::path& path);
void write_logits(const LogitsTensor& tensor, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace eaparse::tensorio
