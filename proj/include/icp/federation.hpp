#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace icp::federation {

struct BundleKey {
    std::string kid;
    std::string algorithm;  // "Ed25519"
    std::vector<std::uint8_t> public_key;
};

/// Versioned set of verification keys for one trust domain. Accepted updates
/// must carry a strictly higher sequence, so federation drift is detectable.
struct TrustBundle {
    std::string trust_domain;
    std::uint64_t sequence = 1;
    std::vector<BundleKey> keys;
    std::int64_t refresh_hint_seconds = 300;

    [[nodiscard]] nlohmann::json to_json() const;
    /// Throws Error(malformed_bundle) on any structural violation.
    static TrustBundle from_json(const nlohmann::json& j);
};

/// Keys for the own domain plus federated peers. Reads are concurrent;
/// updates replace a domain's bundle atomically.
class BundleStore {
  public:
    BundleStore(std::string own_domain, std::int64_t refresh_hint_seconds);

    const std::string& own_domain() const { return own_domain_; }

    /// Registers or rotates own keys; every change bumps the own sequence.
    void set_own_keys(std::vector<BundleKey> keys);
    void add_own_key(BundleKey key);
    void remove_own_key(std::string_view kid);

    [[nodiscard]] TrustBundle export_own() const;

    /// Throws self_import, stale_bundle, or malformed_bundle.
    void import(const TrustBundle& bundle);

    /// Throws unknown_trust_domain (not federated) or self_import (own domain).
    void remove(std::string_view trust_domain);

    [[nodiscard]] bool has_domain(std::string_view trust_domain) const;
    [[nodiscard]] std::optional<BundleKey> find_key(std::string_view trust_domain,
                                                    std::string_view kid) const;
    [[nodiscard]] std::vector<std::string> federated_domains() const;
    [[nodiscard]] std::optional<TrustBundle> bundle_for(std::string_view trust_domain) const;

  private:
    std::string own_domain_;
    std::int64_t refresh_hint_seconds_;
    mutable std::shared_mutex mutex_;
    TrustBundle own_;
    std::map<std::string, TrustBundle, std::less<>> peers_;
};

}  // namespace icp::federation
