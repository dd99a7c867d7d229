#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace veridict {

enum class ErrorKind {
  // corpus
  MissingFile,
  MalformedHeader,
  EmptyDataset,
  DatasetTooSmall,
  InvalidRatio,
  UnlabeledRecord,
  DuplicateId,
  IoFailure,
  // text features
  EmptyCorpus,
  // classifiers
  IncompatibleInput,
  DegenerateLabels,
  DimensionMismatch,
  NoCapableAlgorithm,
  // evaluation / authenticity
  LengthMismatch,
  EmptyInput,
  EmptyLabelColumn,
  // gate / config
  InvalidConfig,
  // harvester
  Timeout,
  HttpError,
  NotHtml,
  DnsFailure,
  RootUnreachable,
  // pipeline
  BundleMissing,
  MalformedBundle,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::DatasetTooSmall: return "DatasetTooSmall";
    case ErrorKind::InvalidRatio: return "InvalidRatio";
    case ErrorKind::UnlabeledRecord: return "UnlabeledRecord";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::IncompatibleInput: return "IncompatibleInput";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoCapableAlgorithm: return "NoCapableAlgorithm";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyLabelColumn: return "EmptyLabelColumn";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::HttpError: return "HttpError";
    case ErrorKind::NotHtml: return "NotHtml";
    case ErrorKind::DnsFailure: return "DnsFailure";
    case ErrorKind::RootUnreachable: return "RootUnreachable";
    case ErrorKind::BundleMissing: return "BundleMissing";
    case ErrorKind::MalformedBundle: return "MalformedBundle";
  }
  return "Unknown";
}

/// Single exception type for the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// HTTP status for HttpError, 0 otherwise.
  int status() const noexcept { return status_; }

  static Error http(int status, const std::string& url) {
    Error e(ErrorKind::HttpError, "status " + std::to_string(status) + " for " + url);
    e.status_ = status;
    return e;
  }

 private:
  ErrorKind kind_;
  int status_ = 0;
};

/// Exit codes: 0 ok, 1 operational (network, IO), 2 invalid input/config, 3 degenerate data.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::IoFailure:
    case ErrorKind::Timeout:
    case ErrorKind::HttpError:
    case ErrorKind::NotHtml:
    case ErrorKind::DnsFailure:
    case ErrorKind::RootUnreachable:
    case ErrorKind::BundleMissing:
      return 1;
    case ErrorKind::EmptyDataset:
    case ErrorKind::DatasetTooSmall:
    case ErrorKind::DegenerateLabels:
    case ErrorKind::NoCapableAlgorithm:
    case ErrorKind::EmptyCorpus:
      return 3;
    default:
      return 2;
  }
}

}  // namespace veridict
