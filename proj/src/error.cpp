#include "icp/error.hpp"

namespace icp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::malformed_identity: return "malformed_identity";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::duplicate_policy_id: return "duplicate_policy_id";
        case ErrorCode::policy_denied: return "policy_denied";
        case ErrorCode::ttl_exceeded: return "ttl_exceeded";
        case ErrorCode::malformed_scope: return "malformed_scope";
        case ErrorCode::malformed_token: return "malformed_token";
        case ErrorCode::unknown_trust_domain: return "unknown_trust_domain";
        case ErrorCode::unknown_key: return "unknown_key";
        case ErrorCode::signature_invalid: return "signature_invalid";
        case ErrorCode::expired: return "expired";
        case ErrorCode::not_yet_valid: return "not_yet_valid";
        case ErrorCode::revoked: return "revoked";
        case ErrorCode::stale_bundle: return "stale_bundle";
        case ErrorCode::malformed_bundle: return "malformed_bundle";
        case ErrorCode::self_import: return "self_import";
        case ErrorCode::chain_invalid: return "chain_invalid";
        case ErrorCode::storage_failure: return "storage_failure";
        case ErrorCode::malformed_request: return "malformed_request";
        case ErrorCode::unknown_policy_version: return "unknown_policy_version";
        case ErrorCode::config_error: return "config_error";
    }
    return "unknown";
}

}  // namespace icp
