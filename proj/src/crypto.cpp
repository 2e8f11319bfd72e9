#include "icp/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <memory>
#include <stdexcept>

namespace icp::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct CtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

constexpr char kHexDigits[] = "0123456789abcdef";
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '-') return 62;
    if (c == '_') return 63;
    return -1;
}

}  // namespace

std::array<std::uint8_t, 32> sha256(const void* data, std::size_t len) {
    std::array<std::uint8_t, 32> out{};
    SHA256(static_cast<const unsigned char*>(data), len, out.data());
    return out;
}

std::array<std::uint8_t, 32> sha256(std::string_view data) {
    return sha256(data.data(), data.size());
}

std::string sha256_hex(std::string_view data) {
    auto digest = sha256(data);
    return hex_encode(digest.data(), digest.size());
}

std::string hex_encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(kHexDigits[data[i] >> 4]);
        out.push_back(kHexDigits[data[i] & 0x0f]);
    }
    return out;
}

std::string hex_encode(const std::vector<std::uint8_t>& data) {
    return hex_encode(data.data(), data.size());
}

std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        return std::nullopt;
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            return std::nullopt;
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string b64url_encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= len) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 0x3f]);
        out.push_back(kB64Alphabet[(v >> 12) & 0x3f]);
        out.push_back(kB64Alphabet[(v >> 6) & 0x3f]);
        out.push_back(kB64Alphabet[v & 0x3f]);
        i += 3;
    }
    std::size_t rest = len - i;
    if (rest == 1) {
        std::uint32_t v = data[i] << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 0x3f]);
        out.push_back(kB64Alphabet[(v >> 12) & 0x3f]);
    } else if (rest == 2) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 0x3f]);
        out.push_back(kB64Alphabet[(v >> 12) & 0x3f]);
        out.push_back(kB64Alphabet[(v >> 6) & 0x3f]);
    }
    return out;
}

std::string b64url_encode(const std::vector<std::uint8_t>& data) {
    return b64url_encode(data.data(), data.size());
}

std::string b64url_encode(std::string_view data) {
    return b64url_encode(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
}

std::optional<std::vector<std::uint8_t>> b64url_decode(std::string_view text) {
    const std::size_t rem = text.size() % 4;
    if (rem == 1) {
        return std::nullopt;  // no valid unpadded base64 has length 1 mod 4
    }
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3 + 2);
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        int v = b64_value(c);
        if (v < 0) {
            return std::nullopt;
        }
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
        }
    }
    // Trailing bits must be zero, otherwise the encoding is not canonical.
    if (bits > 0 && (acc & ((1u << bits) - 1)) != 0) {
        return std::nullopt;
    }
    return out;
}

std::string uuid4() {
    std::uint8_t bytes[16];
    if (RAND_bytes(bytes, sizeof(bytes)) != 1) {
        throw std::runtime_error("RAND_bytes failed");
    }
    bytes[6] = static_cast<std::uint8_t>((bytes[6] & 0x0f) | 0x40);
    bytes[8] = static_cast<std::uint8_t>((bytes[8] & 0x3f) | 0x80);
    std::string hex = hex_encode(bytes, sizeof(bytes));
    std::string out;
    out.reserve(36);
    out.append(hex, 0, 8).push_back('-');
    out.append(hex, 8, 4).push_back('-');
    out.append(hex, 12, 4).push_back('-');
    out.append(hex, 16, 4).push_back('-');
    out.append(hex, 20, 12);
    return out;
}

std::string derive_kid(const std::vector<std::uint8_t>& public_key) {
    auto digest = sha256(public_key.data(), public_key.size());
    return hex_encode(digest.data(), 8);
}

Ed25519KeyPair Ed25519KeyPair::generate() {
    EVP_PKEY* raw = nullptr;
    CtxPtr unused;
    EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr);
    if (ctx == nullptr || EVP_PKEY_keygen_init(ctx) <= 0 || EVP_PKEY_keygen(ctx, &raw) <= 0) {
        EVP_PKEY_CTX_free(ctx);
        throw std::runtime_error("Ed25519 key generation failed");
    }
    EVP_PKEY_CTX_free(ctx);
    PkeyPtr pkey(raw);

    std::vector<std::uint8_t> priv(32), pub(32);
    std::size_t priv_len = priv.size(), pub_len = pub.size();
    if (EVP_PKEY_get_raw_private_key(pkey.get(), priv.data(), &priv_len) <= 0 ||
        EVP_PKEY_get_raw_public_key(pkey.get(), pub.data(), &pub_len) <= 0 ||
        priv_len != 32 || pub_len != 32) {
        throw std::runtime_error("Ed25519 raw key extraction failed");
    }
    return Ed25519KeyPair{derive_kid(pub), std::move(pub), std::move(priv)};
}

Ed25519KeyPair Ed25519KeyPair::from_private_key(const std::vector<std::uint8_t>& private_key) {
    if (private_key.size() != 32) {
        throw std::runtime_error("Ed25519 private key must be 32 bytes");
    }
    PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, private_key.data(),
                                              private_key.size()));
    if (!pkey) {
        throw std::runtime_error("Ed25519 private key load failed");
    }
    std::vector<std::uint8_t> pub(32);
    std::size_t pub_len = pub.size();
    if (EVP_PKEY_get_raw_public_key(pkey.get(), pub.data(), &pub_len) <= 0 || pub_len != 32) {
        throw std::runtime_error("Ed25519 public key derivation failed");
    }
    return Ed25519KeyPair{derive_kid(pub), std::move(pub), private_key};
}

std::vector<std::uint8_t> Ed25519KeyPair::sign(std::string_view message) const {
    PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, private_key.data(),
                                              private_key.size()));
    if (!pkey) {
        throw std::runtime_error("Ed25519 private key load failed");
    }
    CtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) <= 0) {
        throw std::runtime_error("Ed25519 sign init failed");
    }
    std::vector<std::uint8_t> sig(64);
    std::size_t sig_len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &sig_len,
                       reinterpret_cast<const unsigned char*>(message.data()),
                       message.size()) <= 0 ||
        sig_len != 64) {
        throw std::runtime_error("Ed25519 signing failed");
    }
    return sig;
}

bool ed25519_verify(const std::vector<std::uint8_t>& public_key, std::string_view message,
                    const std::vector<std::uint8_t>& signature) {
    if (public_key.size() != 32 || signature.size() != 64) {
        return false;
    }
    PkeyPtr pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                             public_key.size()));
    if (!pkey) {
        return false;
    }
    CtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) <= 0) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            reinterpret_cast<const unsigned char*>(message.data()),
                            message.size()) == 1;
}

}  // namespace icp::crypto
