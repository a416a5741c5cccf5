#include "eaparse/error.hpp"

namespace eaparse {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedMaxval: return "UnsupportedMaxval";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::TrailingData: return "TrailingData";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::InvalidShape: return "InvalidShape";
    case Errc::InvalidMaskValue: return "InvalidMaskValue";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::MissingGradient: return "MissingGradient";
    case Errc::TooSmall: return "TooSmall";
    case Errc::DegenerateMask: return "DegenerateMask";
    case Errc::TooFewPixels: return "TooFewPixels";
    case Errc::ClassAbsent: return "ClassAbsent";
    case Errc::ChannelMismatch: return "ChannelMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NoClassEverPresent: return "NoClassEverPresent";
    case Errc::InvalidBox: return "InvalidBox";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace eaparse
