#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eaparse {

/// Error categories surfaced by every module. Names are part of the public
/// contract (the CLI and the Python bindings report them verbatim).
enum class Errc {
  // tensorio
  MalformedHeader,
  UnsupportedMaxval,
  TruncatedData,
  TrailingData,
  BadMagic,
  BadVersion,
  NonFiniteValue,
  InvalidShape,
  InvalidMaskValue,
  IoFailure,
  // shared shape / argument checks
  ShapeMismatch,
  InvalidArgument,
  // segloss
  LabelOutOfRange,
  EmptyMask,
  MissingGradient,
  // augment
  TooSmall,
  // grabcut
  DegenerateMask,
  TooFewPixels,
  ClassAbsent,
  // ensemble / metrics
  ChannelMismatch,
  EmptyInput,
  NoClassEverPresent,
  // roi
  InvalidBox,
  OutOfBounds,
  SizeMismatch,
  // cli
  InvalidConfig,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace eaparse
