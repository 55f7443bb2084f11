#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hoeffding {

/// Failure categories. The CLI maps each category onto a distinct exit code.
enum class ErrorKind {
  // models
  ExhaustedUrn,
  EmptyMeasure,
  ExtendibilityViolated,
  LengthExceeded,
  RequiresPositiveC,
  // kernels
  MissingMultiset,
  DuplicateMultiset,
  ArityMismatch,
  UnknownSymbol,
  NonNumericAlphabet,
  // conditional / decomposition / weak independence
  HorizonTooShort,
  IndexOutOfRange,
  ZeroDenominator,
  DegenerateAssumption,
  DegeneracyViolated,
  ZeroProjection,
  InvalidArgument,
  // cli
  ParseError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ExhaustedUrn: return "ExhaustedUrn";
    case ErrorKind::EmptyMeasure: return "EmptyMeasure";
    case ErrorKind::ExtendibilityViolated: return "ExtendibilityViolated";
    case ErrorKind::LengthExceeded: return "LengthExceeded";
    case ErrorKind::RequiresPositiveC: return "RequiresPositiveC";
    case ErrorKind::MissingMultiset: return "MissingMultiset";
    case ErrorKind::DuplicateMultiset: return "DuplicateMultiset";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::NonNumericAlphabet: return "NonNumericAlphabet";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::DegenerateAssumption: return "DegenerateAssumption";
    case ErrorKind::DegeneracyViolated: return "DegeneracyViolated";
    case ErrorKind::ZeroProjection: return "ZeroProjection";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hoeffding
