#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mwkit {

// Every failure the library reports carries one of these codes so the CLI can
// map it onto an exit status and tests can match on it without string compares.
enum class ErrorCode {
  SinkVertex,
  SourceVertex,
  DanglingEdgeEndpoint,
  DuplicateId,
  NonDenseIds,
  DifferentStartVertex,
  InvalidPath,
  TagMismatch,
  DimensionMismatch,
  NotContraction,
  NotInjective,
  RangeEscapesAmbient,
  NotACycle,
  MaxIterationsExceeded,
  PrefixTooShort,
  ChainMismatch,
  PointNotOnAttractor,
  ResolutionTooCoarse,
  NoQualifyingCenter,
  GridMismatch,
  OrderMismatch,
  CertificateInvalid,
  SingularAtSample,
  NoConsistentMatching,
  InconsistentOverlap,
  GraphMismatch,
  NotTotallyDisconnected,
  ParseError,
  IoError,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SinkVertex: return "SinkVertex";
    case ErrorCode::SourceVertex: return "SourceVertex";
    case ErrorCode::DanglingEdgeEndpoint: return "DanglingEdgeEndpoint";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NonDenseIds: return "NonDenseIds";
    case ErrorCode::DifferentStartVertex: return "DifferentStartVertex";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::TagMismatch: return "TagMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::RangeEscapesAmbient: return "RangeEscapesAmbient";
    case ErrorCode::NotACycle: return "NotACycle";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::PrefixTooShort: return "PrefixTooShort";
    case ErrorCode::ChainMismatch: return "ChainMismatch";
    case ErrorCode::PointNotOnAttractor: return "PointNotOnAttractor";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::NoQualifyingCenter: return "NoQualifyingCenter";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::CertificateInvalid: return "CertificateInvalid";
    case ErrorCode::SingularAtSample: return "SingularAtSample";
    case ErrorCode::NoConsistentMatching: return "NoConsistentMatching";
    case ErrorCode::InconsistentOverlap: return "InconsistentOverlap";
    case ErrorCode::GraphMismatch: return "GraphMismatch";
    case ErrorCode::NotTotallyDisconnected: return "NotTotallyDisconnected";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// One finding of a validation pass, e.g. `SinkVertex` with subject "2".
struct Issue {
  ErrorCode code;
  std::string subject;
  std::string detail;

  std::string describe() const {
    std::string out = std::string(to_string(code)) + "(" + subject + ")";
    if (!detail.empty()) {
      out += ": " + detail;
    }
    return out;
  }

  friend bool operator==(const Issue& a, const Issue& b) {
    return a.code == b.code && a.subject == b.subject;
  }
};

/// Base exception. Validation failures carry the complete list of issues.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        issues_{Issue{code, message, {}}} {}

  explicit Error(std::vector<Issue> issues)
      : std::runtime_error(join(issues)),
        code_(issues.empty() ? ErrorCode::InvalidArgument : issues.front().code),
        issues_(std::move(issues)) {}

  ErrorCode code() const noexcept { return code_; }
  /// what() without the leading code name.
  std::string message() const {
    if (issues_.size() == 1 && issues_.front().detail.empty()) return issues_.front().subject;
    return join(issues_);
  }
  const std::vector<Issue>& issues() const noexcept { return issues_; }

  bool has(ErrorCode code, const std::string& subject) const {
    for (const auto& issue : issues_) {
      if (issue.code == code && issue.subject == subject) {
        return true;
      }
    }
    return false;
  }

 private:
  static std::string join(const std::vector<Issue>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) {
        out += "; ";
      }
      out += issue.describe();
    }
    return out;
  }

  ErrorCode code_;
  std::vector<Issue> issues_;
};

}  // namespace mwkit
