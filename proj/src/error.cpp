#include "cdsh/error.hpp"

namespace cdsh {

std::string_view error_message(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "invalid group parameters";
    case ErrorCode::kInvalidPointEncoding: return "invalid point encoding";
    case ErrorCode::kInvalidScalarEncoding: return "invalid scalar encoding";
    case ErrorCode::kEmptyMultiscalar: return "empty multiscalar input";
    case ErrorCode::kHashSignatureViolation: return "hash signature violation";
    case ErrorCode::kCiphertextAuthFailed: return "ciphertext authentication failed";
    case ErrorCode::kCiphertextParse: return "ciphertext parse error";
    case ErrorCode::kMessageParse: return "message parse error";
    case ErrorCode::kInvalidIdentity: return "invalid identity";
    case ErrorCode::kAlreadyRegistered: return "already registered";
    case ErrorCode::kNoRegistrar: return "no registrar";
    case ErrorCode::kStaleTimestamp: return "stale timestamp";
    case ErrorCode::kUnknownIdentity: return "unknown identity";
    case ErrorCode::kDeviceRevoked: return "device revoked";
    case ErrorCode::kSignatureInvalid: return "signature invalid";
    case ErrorCode::kNotSubscribed: return "not subscribed";
    case ErrorCode::kEmptyBatch: return "empty batch";
    case ErrorCode::kNoData: return "no data";
    case ErrorCode::kIntegrityCheckFailed: return "integrity check failed";
    case ErrorCode::kStorageUnavailable: return "storage unavailable";
    case ErrorCode::kReplicationFailure: return "replication failure";
    case ErrorCode::kPublicKeyTampered: return "public key tampered";
    case ErrorCode::kAccessDenied: return "access denied";
    case ErrorCode::kUntraceableReport: return "untraceable report";
    case ErrorCode::kConfig: return "config error";
  }
  return "unknown error";
}

}  // namespace cdsh
