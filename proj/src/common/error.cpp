#include "ransd/common/error.hpp"

#include <cstdio>

namespace ransd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedDos: return "MalformedDos";
    case ErrorKind::BadPeOffset: return "BadPeOffset";
    case ErrorKind::MissingPeSignature: return "MissingPeSignature";
    case ErrorKind::TruncatedHeader: return "TruncatedHeader";
    case ErrorKind::UnsupportedOptionalMagic: return "UnsupportedOptionalMagic";
    case ErrorKind::MalformedJson: return "MalformedJson";
    case ErrorKind::MissingBehaviorSection: return "MissingBehaviorSection";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::InvalidN: return "InvalidN";
    case ErrorKind::EvaluatorFailure: return "EvaluatorFailure";
    case ErrorKind::FoldTooSmall: return "FoldTooSmall";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Format: return "Format";
  }
  return "Unknown";
}

std::string PeError::hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace ransd
