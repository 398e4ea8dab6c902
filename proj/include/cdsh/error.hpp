#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdsh {

enum class ErrorCode {
  kInvalidParams,
  kInvalidPointEncoding,
  kInvalidScalarEncoding,
  kEmptyMultiscalar,
  kHashSignatureViolation,
  kCiphertextAuthFailed,
  kCiphertextParse,
  kMessageParse,
  kInvalidIdentity,
  kAlreadyRegistered,
  kNoRegistrar,
  kStaleTimestamp,
  kUnknownIdentity,
  kDeviceRevoked,
  kSignatureInvalid,
  kNotSubscribed,
  kEmptyBatch,
  kNoData,
  kIntegrityCheckFailed,
  kStorageUnavailable,
  kReplicationFailure,
  kPublicKeyTampered,
  kAccessDenied,
  kUntraceableReport,
  kConfig,
};

/// Canonical short message for each code; these strings are part of the
/// observable contract (CLI output, metrics keys, Python exceptions).
std::string_view error_message(ErrorCode code);

class Error : public std::runtime_error {
 public:
  explicit Error(ErrorCode code)
      : std::runtime_error(std::string(error_message(code))), code_(code) {}
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_message(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cdsh
