#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icp {

/// Stable error codes shared by the library, the HTTP API, and the CLI.
/// The wire form is the snake_case name returned by to_string().
enum class ErrorCode {
    malformed_identity,
    parse_error,
    duplicate_policy_id,
    policy_denied,
    ttl_exceeded,
    malformed_scope,
    malformed_token,
    unknown_trust_domain,
    unknown_key,
    signature_invalid,
    expired,
    not_yet_valid,
    revoked,
    stale_bundle,
    malformed_bundle,
    self_import,
    chain_invalid,
    storage_failure,
    malformed_request,
    unknown_policy_version,
    config_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          message_(message) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

  private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace icp
