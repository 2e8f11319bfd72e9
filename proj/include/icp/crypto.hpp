#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icp::crypto {

inline constexpr std::string_view kAlgorithmName = "Ed25519";

std::array<std::uint8_t, 32> sha256(const void* data, std::size_t len);
std::array<std::uint8_t, 32> sha256(std::string_view data);
std::string sha256_hex(std::string_view data);

std::string hex_encode(const std::uint8_t* data, std::size_t len);
std::string hex_encode(const std::vector<std::uint8_t>& data);
/// Strict: even length, lowercase [0-9a-f] only.
std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view hex);

/// RFC 4648 base64url without padding.
std::string b64url_encode(const std::uint8_t* data, std::size_t len);
std::string b64url_encode(const std::vector<std::uint8_t>& data);
std::string b64url_encode(std::string_view data);
/// Strict: rejects padding and any character outside the base64url alphabet.
std::optional<std::vector<std::uint8_t>> b64url_decode(std::string_view text);

/// Random version-4 UUID in canonical 8-4-4-4-12 form.
std::string uuid4();

/// Signing key for transaction tokens. The key id is derived from the public
/// key (first 8 bytes of its SHA-256, hex), so bundles and tokens agree on it
/// without coordination.
struct Ed25519KeyPair {
    std::string kid;                       // 16 lowercase hex chars
    std::vector<std::uint8_t> public_key;  // 32 raw bytes
    std::vector<std::uint8_t> private_key; // 32 raw bytes, never serialized in bundles or logs

    static Ed25519KeyPair generate();
    static Ed25519KeyPair from_private_key(const std::vector<std::uint8_t>& private_key);

    [[nodiscard]] std::vector<std::uint8_t> sign(std::string_view message) const;
};

std::string derive_kid(const std::vector<std::uint8_t>& public_key);

bool ed25519_verify(const std::vector<std::uint8_t>& public_key, std::string_view message,
                    const std::vector<std::uint8_t>& signature);

}  // namespace icp::crypto
