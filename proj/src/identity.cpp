#include "icp/identity.hpp"

#include <algorithm>
#include <cctype>

#include "icp/error.hpp"

namespace icp::identity {

namespace {

bool is_trust_domain_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
}

bool is_spiffe_path_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-' || c == '/';
}

bool is_attr_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_';
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void malformed(const std::string& detail) {
    throw Error(ErrorCode::malformed_identity, detail);
}

/// Lowercases a caller-supplied attribute key and enforces the key charset.
std::string normalize_attr_key(std::string_view key) {
    if (key.empty()) {
        malformed("empty attribute key");
    }
    std::string lowered = ascii_lower(key);
    for (char c : lowered) {
        if (!is_attr_key_char(c)) {
            malformed("attribute key '" + lowered + "' contains characters outside [a-z0-9_.]");
        }
    }
    return lowered;
}

/// Percent-encodes ':' and '%' so colon-separated canonical URIs stay
/// injective for interior fields.
std::string escape_uri_field(std::string_view field) {
    std::string out;
    out.reserve(field.size());
    for (char c : field) {
        if (c == ':') {
            out += "%3A";
        } else if (c == '%') {
            out += "%25";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

/// Extracts the lowercased host from a URI of the form scheme://[user@]host[:port][/...].
std::string issuer_host(const std::string& issuer) {
    auto scheme_end = issuer.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0) {
        malformed("issuer is not a parseable URI: " + issuer);
    }
    std::string authority = issuer.substr(scheme_end + 3);
    auto slash = authority.find('/');
    if (slash != std::string::npos) {
        authority.resize(slash);
    }
    auto at = authority.rfind('@');
    if (at != std::string::npos) {
        authority.erase(0, at + 1);
    }
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        std::string port = authority.substr(colon + 1);
        if (port.empty() || !std::all_of(port.begin(), port.end(),
                                         [](unsigned char c) { return std::isdigit(c); })) {
            malformed("issuer has a malformed port: " + issuer);
        }
        authority.resize(colon);
    }
    std::string host = ascii_lower(authority);
    if (host.empty() || !valid_trust_domain(host)) {
        malformed("issuer host is not a valid domain name: " + issuer);
    }
    return host;
}

}  // namespace

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::human: return "human";
        case Kind::workload: return "workload";
        case Kind::automation: return "automation";
    }
    return "workload";
}

Kind kind_from_string(std::string_view text) {
    if (text == "human") return Kind::human;
    if (text == "workload") return Kind::workload;
    if (text == "automation") return Kind::automation;
    throw Error(ErrorCode::malformed_request, "unknown identity kind '" + std::string(text) + "'");
}

bool valid_trust_domain(std::string_view domain) {
    if (domain.empty() || domain.size() > 255) {
        return false;
    }
    return std::all_of(domain.begin(), domain.end(), is_trust_domain_char);
}

nlohmann::json UnifiedIdentity::to_json() const {
    return nlohmann::json{{"kind", std::string(to_string(kind))},
                          {"trust_domain", trust_domain},
                          {"uri", canonical_uri},
                          {"attributes", attributes}};
}

UnifiedIdentity from_json_impl(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("trust_domain") ||
        !j.contains("uri") || !j["kind"].is_string() || !j["trust_domain"].is_string() ||
        !j["uri"].is_string()) {
        throw Error(ErrorCode::malformed_request, "identity requires kind, trust_domain, uri");
    }
    UnifiedIdentity id;
    id.kind = kind_from_string(j["kind"].get<std::string>());
    id.trust_domain = j["trust_domain"].get<std::string>();
    id.canonical_uri = j["uri"].get<std::string>();
    if (!valid_trust_domain(id.trust_domain)) {
        throw Error(ErrorCode::malformed_request, "invalid trust domain '" + id.trust_domain + "'");
    }
    if (id.canonical_uri.empty()) {
        throw Error(ErrorCode::malformed_request, "identity uri must be non-empty");
    }
    if (j.contains("attributes")) {
        if (!j["attributes"].is_object()) {
            throw Error(ErrorCode::malformed_request, "identity attributes must be an object");
        }
        for (const auto& [k, v] : j["attributes"].items()) {
            if (!v.is_string()) {
                throw Error(ErrorCode::malformed_request,
                            "identity attribute '" + k + "' must be a string");
            }
            id.attributes[k] = v.get<std::string>();
        }
    }
    return id;
}

UnifiedIdentity UnifiedIdentity::from_json(const nlohmann::json& j) {
    return from_json_impl(j);
}

UnifiedIdentity normalize_spiffe(std::string_view uri) {
    constexpr std::string_view kScheme = "spiffe://";
    if (uri.size() < kScheme.size()) {
        malformed("not a spiffe URI");
    }
    std::string lowered_scheme = ascii_lower(uri.substr(0, kScheme.size()));
    if (lowered_scheme != kScheme) {
        malformed("wrong scheme, expected spiffe://");
    }
    std::string_view rest = uri.substr(kScheme.size());
    auto slash = rest.find('/');
    if (slash == std::string::npos || slash + 1 == rest.size()) {
        malformed("spiffe URI has an empty path");
    }
    std::string authority = ascii_lower(rest.substr(0, slash));
    if (!valid_trust_domain(authority)) {
        malformed("authority '" + authority + "' violates the trust-domain charset");
    }
    std::string path(rest.substr(slash));  // includes leading '/'
    for (char c : path) {
        if (!is_spiffe_path_char(c)) {
            malformed("path contains characters outside [a-zA-Z0-9._-/]");
        }
    }
    // Split on '/': the leading empty segment is the root; every other
    // segment must be non-empty and not a dot-segment.
    std::size_t pos = 1;
    while (pos <= path.size()) {
        auto next = path.find('/', pos);
        std::string segment = path.substr(pos, next == std::string::npos ? std::string::npos
                                                                         : next - pos);
        if (segment.empty()) {
            malformed("empty path segment");
        }
        if (segment == "." || segment == "..") {
            malformed("path segment '" + segment + "' is forbidden");
        }
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }

    UnifiedIdentity id;
    id.kind = Kind::workload;
    id.trust_domain = authority;
    id.canonical_uri = "spiffe://" + authority + path;
    id.attributes["path"] = path;
    return id;
}

UnifiedIdentity normalize_human(const HumanAssertion& assertion, std::string_view trust_domain) {
    if (assertion.issuer.empty()) {
        malformed("empty issuer");
    }
    if (assertion.subject.empty()) {
        malformed("empty subject");
    }
    if (!valid_trust_domain(trust_domain)) {
        malformed("invalid trust domain '" + std::string(trust_domain) + "'");
    }
    std::string host = issuer_host(assertion.issuer);

    UnifiedIdentity id;
    id.kind = Kind::human;
    id.trust_domain = std::string(trust_domain);
    // The host charset has no ':', so the subject is unambiguously the final field.
    id.canonical_uri = "icp:human:" + host + ":" + assertion.subject;
    id.attributes["issuer"] = assertion.issuer;
    for (const auto& [key, value] : assertion.verified_claims) {
        id.attributes["claim." + normalize_attr_key(key)] = value;
    }
    return id;
}

UnifiedIdentity normalize_automation(const AutomationAssertion& assertion,
                                     std::string_view trust_domain) {
    if (assertion.platform.empty() || assertion.pipeline.empty() || assertion.run_id.empty()) {
        malformed("platform, pipeline, and run_id must be non-empty");
    }
    if (!valid_trust_domain(trust_domain)) {
        malformed("invalid trust domain '" + std::string(trust_domain) + "'");
    }
    UnifiedIdentity id;
    id.kind = Kind::automation;
    id.trust_domain = std::string(trust_domain);
    // Interior fields are escaped so the colon-separated form stays injective;
    // run_id is the final field and may contain anything.
    id.canonical_uri = "icp:auto:" + escape_uri_field(assertion.platform) + ":" +
                       escape_uri_field(assertion.pipeline) + ":" + assertion.run_id;
    for (const auto& [key, value] : assertion.claims) {
        id.attributes[normalize_attr_key(key)] = value;
    }
    id.attributes["platform"] = assertion.platform;
    id.attributes["pipeline"] = assertion.pipeline;
    id.attributes["run_id"] = assertion.run_id;
    return id;
}

}  // namespace icp::identity
