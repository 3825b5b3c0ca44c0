#pragma once

#include <stdexcept>
#include <string>

namespace specnet {

enum class ErrorKind {
  OversizeDocument,
  MissingDomain,
  DuplicateDomain,
  IoFailure,
  FileMissing,
  EmptyCorpus,
  ShapeError,
  NonFiniteGradient,
  NonFiniteLoss,
  CalibrationDegenerate,
  ConfigError,
  UnsupportedVersion,
  CorruptBundle,
  EmptyDataset,
};

constexpr const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OversizeDocument: return "OversizeDocument";
    case ErrorKind::MissingDomain: return "MissingDomain";
    case ErrorKind::DuplicateDomain: return "DuplicateDomain";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::FileMissing: return "FileMissing";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::CalibrationDegenerate: return "CalibrationDegenerate";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::CorruptBundle: return "CorruptBundle";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
  }
  return "Unknown";
}

/// Every failure the library reports carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace specnet
