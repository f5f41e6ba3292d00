#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ransd {

enum class ErrorKind {
  // PE parsing
  MalformedDos,
  BadPeOffset,
  MissingPeSignature,
  TruncatedHeader,
  UnsupportedOptionalMagic,
  // behaviour reports
  MalformedJson,
  MissingBehaviorSection,
  EmptyCorpus,
  // numerics and learning
  DegenerateInput,
  NonFinite,
  DimensionMismatch,
  LengthMismatch,
  SingleClass,
  InvalidN,
  EvaluatorFailure,
  FoldTooSmall,
  InvalidArgument,
  // plumbing
  Io,
  Format,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure inside a PE image; `offset` is the byte position that could not be read or validated.
class PeError : public Error {
 public:
  PeError(ErrorKind kind, std::uint64_t offset, const std::string& message)
      : Error(kind, message + " (offset 0x" + hex(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  static std::string hex(std::uint64_t v);
  std::uint64_t offset_;
};

}  // namespace ransd
