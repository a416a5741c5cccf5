#include "eaparse/raster.hpp"

#include <algorithm>

namespace eaparse {

void validate_mask(const BinaryMask& mask) {
  const auto data = mask.data();
  const auto bad = std::find_if(data.begin(), data.end(), [](std::uint8_t v) { return v > 1; });
  if (bad != data.end()) {
    const auto offset = static_cast<std::size_t>(bad - data.begin());
    fail(Errc::InvalidMaskValue, "mask value " + std::to_string(*bad) + " at pixel (" +
                                     std::to_string(offset / mask.width()) + "," +
                                     std::to_string(offset % mask.width()) + ")");
  }
}

std::size_t count_set(const BinaryMask& mask) noexcept {
  return static_cast<std::size_t>(std::count(mask.data().begin(), mask.data().end(), 1));
}

}  // namespace eaparse
