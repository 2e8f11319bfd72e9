#include "icp/federation.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "icp/crypto.hpp"
#include "icp/error.hpp"
#include "icp/identity.hpp"

namespace icp::federation {

namespace {

[[noreturn]] void malformed(const std::string& detail) {
    throw Error(ErrorCode::malformed_bundle, detail);
}

void validate_bundle(const TrustBundle& b) {
    if (!identity::valid_trust_domain(b.trust_domain)) {
        malformed("invalid trust domain '" + b.trust_domain + "'");
    }
    if (b.sequence < 1) {
        malformed("sequence must be >= 1");
    }
    if (b.keys.empty()) {
        malformed("keys list must be non-empty");
    }
    if (b.refresh_hint_seconds < 0) {
        malformed("refresh_hint_seconds must be >= 0");
    }
    std::set<std::string_view> kids;
    for (const auto& key : b.keys) {
        if (key.algorithm != crypto::kAlgorithmName) {
            malformed("unsupported algorithm '" + key.algorithm + "'");
        }
        if (key.public_key.size() != 32) {
            malformed("public key for kid '" + key.kid + "' is not 32 bytes");
        }
        if (key.kid.size() != 16) {
            malformed("kid '" + key.kid + "' is not 16 hex chars");
        }
        if (!kids.insert(key.kid).second) {
            malformed("duplicate kid '" + key.kid + "'");
        }
    }
}

}  // namespace

nlohmann::json TrustBundle::to_json() const {
    nlohmann::json keys_json = nlohmann::json::array();
    for (const auto& key : keys) {
        keys_json.push_back(nlohmann::json{{"kid", key.kid},
                                           {"algorithm", key.algorithm},
                                           {"public_key", crypto::b64url_encode(key.public_key)}});
    }
    return nlohmann::json{{"trust_domain", trust_domain},
                          {"sequence", sequence},
                          {"refresh_hint_seconds", refresh_hint_seconds},
                          {"keys", std::move(keys_json)}};
}

TrustBundle TrustBundle::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        malformed("bundle must be a JSON object");
    }
    TrustBundle b;
    if (!j.contains("trust_domain") || !j["trust_domain"].is_string()) {
        malformed("trust_domain missing or not a string");
    }
    b.trust_domain = j["trust_domain"].get<std::string>();
    if (!j.contains("sequence") || !j["sequence"].is_number_unsigned()) {
        malformed("sequence missing or not a non-negative integer");
    }
    b.sequence = j["sequence"].get<std::uint64_t>();
    if (j.contains("refresh_hint_seconds")) {
        if (!j["refresh_hint_seconds"].is_number_integer()) {
            malformed("refresh_hint_seconds must be an integer");
        }
        b.refresh_hint_seconds = j["refresh_hint_seconds"].get<std::int64_t>();
    }
    if (!j.contains("keys") || !j["keys"].is_array()) {
        malformed("keys missing or not an array");
    }
    for (const auto& entry : j["keys"]) {
        if (!entry.is_object() || !entry.contains("kid") || !entry.contains("algorithm") ||
            !entry.contains("public_key") || !entry["kid"].is_string() ||
            !entry["algorithm"].is_string() || !entry["public_key"].is_string()) {
            malformed("key entries require kid, algorithm, public_key strings");
        }
        BundleKey key;
        key.kid = entry["kid"].get<std::string>();
        key.algorithm = entry["algorithm"].get<std::string>();
        auto decoded = crypto::b64url_decode(entry["public_key"].get<std::string>());
        if (!decoded) {
            malformed("public_key for kid '" + key.kid + "' is not valid base64url");
        }
        key.public_key = std::move(*decoded);
        b.keys.push_back(std::move(key));
    }
    validate_bundle(b);
    return b;
}

BundleStore::BundleStore(std::string own_domain, std::int64_t refresh_hint_seconds)
    : own_domain_(std::move(own_domain)), refresh_hint_seconds_(refresh_hint_seconds) {
    if (!identity::valid_trust_domain(own_domain_)) {
        throw Error(ErrorCode::config_error, "invalid own trust domain '" + own_domain_ + "'");
    }
    own_.trust_domain = own_domain_;
    own_.sequence = 0;  // becomes 1 on the first key registration
    own_.refresh_hint_seconds = refresh_hint_seconds_;
}

void BundleStore::set_own_keys(std::vector<BundleKey> keys) {
    std::unique_lock lock(mutex_);
    own_.keys = std::move(keys);
    own_.sequence += 1;
    validate_bundle(own_);
}

void BundleStore::add_own_key(BundleKey key) {
    std::unique_lock lock(mutex_);
    for (const auto& existing : own_.keys) {
        if (existing.kid == key.kid) {
            throw Error(ErrorCode::malformed_bundle, "kid '" + key.kid + "' already registered");
        }
    }
    own_.keys.push_back(std::move(key));
    own_.sequence += 1;
    validate_bundle(own_);
}

void BundleStore::remove_own_key(std::string_view kid) {
    std::unique_lock lock(mutex_);
    auto it = std::find_if(own_.keys.begin(), own_.keys.end(),
                           [&](const BundleKey& k) { return k.kid == kid; });
    if (it == own_.keys.end()) {
        throw Error(ErrorCode::unknown_key, "kid '" + std::string(kid) + "' is not registered");
    }
    own_.keys.erase(it);
    own_.sequence += 1;
    validate_bundle(own_);
}

TrustBundle BundleStore::export_own() const {
    std::shared_lock lock(mutex_);
    if (own_.keys.empty()) {
        throw Error(ErrorCode::config_error, "no own keys loaded");
    }
    return own_;
}

void BundleStore::import(const TrustBundle& bundle) {
    validate_bundle(bundle);
    std::unique_lock lock(mutex_);
    if (bundle.trust_domain == own_domain_) {
        throw Error(ErrorCode::self_import, "bundle is for the own trust domain");
    }
    auto it = peers_.find(bundle.trust_domain);
    if (it != peers_.end() && bundle.sequence <= it->second.sequence) {
        throw Error(ErrorCode::stale_bundle,
                    "bundle sequence " + std::to_string(bundle.sequence) +
                        " is not newer than stored sequence " +
                        std::to_string(it->second.sequence));
    }
    peers_[bundle.trust_domain] = bundle;
}

void BundleStore::remove(std::string_view trust_domain) {
    std::unique_lock lock(mutex_);
    if (trust_domain == own_domain_) {
        throw Error(ErrorCode::self_import, "cannot remove the own trust domain");
    }
    auto it = peers_.find(trust_domain);
    if (it == peers_.end()) {
        throw Error(ErrorCode::unknown_trust_domain,
                    "'" + std::string(trust_domain) + "' is not federated");
    }
    peers_.erase(it);
}

bool BundleStore::has_domain(std::string_view trust_domain) const {
    std::shared_lock lock(mutex_);
    if (trust_domain == own_domain_) {
        return !own_.keys.empty();
    }
    return peers_.find(trust_domain) != peers_.end();
}

std::optional<BundleKey> BundleStore::find_key(std::string_view trust_domain,
                                               std::string_view kid) const {
    std::shared_lock lock(mutex_);
    const TrustBundle* bundle = nullptr;
    if (trust_domain == own_domain_) {
        bundle = &own_;
    } else {
        auto it = peers_.find(trust_domain);
        if (it != peers_.end()) {
            bundle = &it->second;
        }
    }
    if (bundle == nullptr) {
        return std::nullopt;
    }
    for (const auto& key : bundle->keys) {
        if (key.kid == kid) {
            return key;
        }
    }
    return std::nullopt;
}

std::vector<std::string> BundleStore::federated_domains() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    out.reserve(peers_.size());
    for (const auto& [domain, _] : peers_) {
        out.push_back(domain);
    }
    return out;
}

std::optional<TrustBundle> BundleStore::bundle_for(std::string_view trust_domain) const {
    std::shared_lock lock(mutex_);
    if (trust_domain == own_domain_) {
        return own_;
    }
    auto it = peers_.find(trust_domain);
    if (it == peers_.end()) {
        return std::nullopt;
    }
    return it->second;
}

}  // namespace icp::federation
