#include "eaparse/tensorio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace eaparse::tensorio {
namespace {

constexpr std::array<std::uint8_t, 4> kLogitsMagic = {'F', 'P', 'L', 'T'};

bool is_space(std::uint8_t b) {
  return b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' || b == '\f';
}

struct NetpbmHeader {
  int width = 0;
  int height = 0;
  std::size_t payload_offset = 0;
};

NetpbmHeader parse_netpbm_header(std::span<const std::uint8_t> bytes, char kind) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != static_cast<std::uint8_t>(kind)) {
    fail(Errc::MalformedHeader, std::string("expected magic \"P") + kind + "\"");
  }
  std::size_t pos = 2;
  std::array<std::uint64_t, 3> fields{};
  for (auto& field : fields) {
    const std::size_t ws_start = pos;
    while (pos < bytes.size() && is_space(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      fail(Errc::MalformedHeader, "comments are not accepted in headers");
    }
    if (pos == ws_start) fail(Errc::MalformedHeader, "missing whitespace between header fields");
    const std::size_t digits_start = pos;
    std::uint64_t value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
        fail(Errc::MalformedHeader, "header field out of range");
      }
      ++pos;
    }
    if (pos == digits_start) {
      if (pos >= bytes.size()) fail(Errc::MalformedHeader, "header ends prematurely");
      fail(Errc::MalformedHeader, "non-numeric header field");
    }
    field = value;
  }
  if (pos >= bytes.size() || !is_space(bytes[pos])) {
    fail(Errc::MalformedHeader, "maxval must be followed by a single whitespace byte");
  }
  ++pos;
  if (fields[0] == 0 || fields[1] == 0) fail(Errc::MalformedHeader, "zero image dimension");
  if (fields[2] != 255) {
    fail(Errc::UnsupportedMaxval, "maxval " + std::to_string(fields[2]) + " (only 255)");
  }
  return {static_cast<int>(fields[0]), static_cast<int>(fields[1]), pos};
}

std::vector<std::uint8_t> extract_payload(std::span<const std::uint8_t> bytes,
                                          const NetpbmHeader& header, std::size_t channels) {
  const std::size_t expected = static_cast<std::size_t>(header.width) *
                               static_cast<std::size_t>(header.height) * channels;
  const std::size_t available = bytes.size() - header.payload_offset;
  if (available < expected) {
    fail(Errc::TruncatedData, "payload has " + std::to_string(available) + " bytes, expected " +
                                  std::to_string(expected));
  }
  if (available > expected) {
    fail(Errc::TrailingData, std::to_string(available - expected) + " bytes after payload");
  }
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(header.payload_offset);
  return {first, bytes.end()};
}

template <typename R>
std::vector<std::uint8_t> encode_netpbm(const R& raster, char kind) {
  if (raster.empty()) fail(Errc::InvalidShape, "cannot encode an empty raster");
  const std::string header = std::string("P") + kind + "\n" + std::to_string(raster.width()) +
                             " " + std::to_string(raster.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.data().begin(), raster.data().end());
  return out;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[offset + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_label_map(const LabelMap& map) { return encode_netpbm(map, '5'); }

LabelMap decode_label_map(std::span<const std::uint8_t> bytes) {
  const auto header = parse_netpbm_header(bytes, '5');
  return LabelMap(header.height, header.width, extract_payload(bytes, header, 1));
}

std::vector<std::uint8_t> encode_mask(const BinaryMask& mask) {
  validate_mask(mask);
  return encode_netpbm(mask, '5');
}

BinaryMask decode_mask(std::span<const std::uint8_t> bytes) {
  const auto header = parse_netpbm_header(bytes, '5');
  BinaryMask mask(header.height, header.width, extract_payload(bytes, header, 1));
  validate_mask(mask);
  return mask;
}

std::vector<std::uint8_t> encode_rgb_image(const RgbImage& image) {
  return encode_netpbm(image, '6');
}

RgbImage decode_rgb_image(std::span<const std::uint8_t> bytes) {
  const auto header = parse_netpbm_header(bytes, '6');
  return RgbImage(header.height, header.width, extract_payload(bytes, header, 3));
}

std::vector<std::uint8_t> encode_logits(const LogitsTensor& tensor) {
  if (tensor.empty()) fail(Errc::InvalidShape, "cannot encode an empty tensor");
  std::vector<std::uint8_t> out(kLogitsMagic.begin(), kLogitsMagic.end());
  out.reserve(kLogitsHeaderBytes + tensor.size() * 4);
  put_u32(out, kLogitsVersion);
  put_u32(out, static_cast<std::uint32_t>(tensor.channels()));
  put_u32(out, static_cast<std::uint32_t>(tensor.height()));
  put_u32(out, static_cast<std::uint32_t>(tensor.width()));
  std::size_t index = 0;
  for (double v : tensor.data()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      fail(Errc::NonFiniteValue, "value at flat index " + std::to_string(index) +
                                     " is not representable as a finite float32");
    }
    put_u32(out, std::bit_cast<std::uint32_t>(f));
    ++index;
  }
  return out;
}

LogitsTensor decode_logits(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kLogitsMagic.begin(), kLogitsMagic.end(), bytes.begin())) {
    fail(Errc::BadMagic, "expected magic \"FPLT\"");
  }
  if (bytes.size() < kLogitsHeaderBytes) fail(Errc::TruncatedData, "header shorter than 20 bytes");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kLogitsVersion) fail(Errc::BadVersion, "version " + std::to_string(version));
  const std::uint32_t c = get_u32(bytes, 8);
  const std::uint32_t h = get_u32(bytes, 12);
  const std::uint32_t w = get_u32(bytes, 16);
  constexpr auto kMax = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
  if (c == 0 || h == 0 || w == 0 || c > kMax || h > kMax || w > kMax) {
    fail(Errc::InvalidShape, "invalid tensor shape " + std::to_string(c) + "x" +
                                 std::to_string(h) + "x" + std::to_string(w));
  }
  const std::size_t available = (bytes.size() - kLogitsHeaderBytes) / 4;
  // c*h fits in 64 bits; dividing avoids overflowing the full product.
  if (static_cast<std::size_t>(c) * h > available / w) {
    fail(Errc::TruncatedData, "payload holds " + std::to_string(available) +
                                  " values, fewer than the declared shape requires");
  }
  const std::size_t count = static_cast<std::size_t>(c) * h * w;
  if (bytes.size() != kLogitsHeaderBytes + count * 4) {
    fail(Errc::TrailingData, "bytes after payload");
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(get_u32(bytes, kLogitsHeaderBytes + i * 4));
    if (!std::isfinite(f)) {
      fail(Errc::NonFiniteValue, "non-finite value at flat index " + std::to_string(i));
    }
    values[i] = f;
  }
  return LogitsTensor(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w),
                      std::move(values));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::IoFailure, "read error on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(Errc::IoFailure, "write error on " + path.string());
}

namespace {

template <typename Fn>
auto decode_file(const std::filesystem::path& path, Fn decode) {
  const auto bytes = read_file(path);
  try {
    return decode(std::span<const std::uint8_t>(bytes));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()));
  }
}

}  // namespace

LabelMap read_label_map(const std::filesystem::path& path) {
  return decode_file(path, decode_label_map);
}
void write_label_map(const LabelMap& map, const std::filesystem::path& path) {
  write_file(path, encode_label_map(map));
}

BinaryMask read_mask(const std::filesystem::path& path) { return decode_file(path, decode_mask); }
void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  write_file(path, encode_mask(mask));
}

RgbImage read_rgb_image(const std::filesystem::path& path) {
  return decode_file(path, decode_rgb_image);
}
void write_rgb_image(const RgbImage& image, const std::filesystem::path& path) {
  write_file(path, encode_rgb_image(image));
}

LogitsTensor read_logits(const std::filesystem::path& path) {
  return decode_file(path, decode_logits);
}
void write_logits(const LogitsTensor& tensor, const std::filesystem::path& path) {
  write_file(path, encode_logits(tensor));
}

}  // namespace eaparse::tensorio
