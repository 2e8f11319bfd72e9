#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace icp::identity {

enum class Kind { human, workload, automation };

std::string_view to_string(Kind kind);
Kind kind_from_string(std::string_view text);  // throws malformed_request on unknown value

/// Canonical, policy-addressable form of any actor. The canonical URI is a
/// pure function of the input assertion: same input, byte-identical URI.
struct UnifiedIdentity {
    Kind kind = Kind::workload;
    std::string trust_domain;  // lowercase, [a-z0-9._-]+, 1-255 chars
    std::string canonical_uri;
    std::map<std::string, std::string> attributes;  // keys [a-z0-9_.]+

    [[nodiscard]] nlohmann::json to_json() const;
    static UnifiedIdentity from_json(const nlohmann::json& j);
};

/// An already-verified human SSO assertion. Upstream protocol handling is out
/// of scope; callers hand over the verified claims.
struct HumanAssertion {
    std::string issuer;   // URI, e.g. https://sso.example.org
    std::string subject;
    std::map<std::string, std::string> verified_claims;
};

struct AutomationAssertion {
    std::string platform;
    std::string pipeline;
    std::string run_id;
    std::map<std::string, std::string> claims;  // e.g. sha, branch, actor
};

bool valid_trust_domain(std::string_view domain);

UnifiedIdentity normalize_spiffe(std::string_view uri);
UnifiedIdentity normalize_human(const HumanAssertion& assertion, std::string_view trust_domain);
UnifiedIdentity normalize_automation(const AutomationAssertion& assertion,
                                     std::string_view trust_domain);

}  // namespace icp::identity
