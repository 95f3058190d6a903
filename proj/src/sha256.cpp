#include "chainlearn/sha256.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

#include "chainlearn/bytes.hpp"

namespace chainlearn {

Hash256 sha256(std::span<const std::uint8_t> data) {
    Hash256 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw std::runtime_error("sha256: EVP_Digest failed");
    return out;
}

Hash256 sha256(std::string_view data) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Hash256 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
    constexpr std::size_t kBlock = 64;
    std::array<std::uint8_t, kBlock> k{};
    if (key.size() > kBlock) {
        const Hash256 kh = sha256(key);
        std::memcpy(k.data(), kh.data(), kh.size());
    } else {
        std::memcpy(k.data(), key.data(), key.size());
    }

    std::array<std::uint8_t, kBlock> ipad{};
    std::array<std::uint8_t, kBlock> opad{};
    for (std::size_t i = 0; i < kBlock; ++i) {
        ipad[i] = static_cast<std::uint8_t>(k[i] ^ 0x36);
        opad[i] = static_cast<std::uint8_t>(k[i] ^ 0x5c);
    }

    ByteWriter inner;
    inner.put_bytes(ipad);
    inner.put_bytes(data);
    const Hash256 inner_hash = sha256(inner.bytes());

    ByteWriter outer;
    outer.put_bytes(opad);
    outer.put_bytes(inner_hash);
    return sha256(outer.bytes());
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (const std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("from_hex: odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_nibble(hex[i]);
        const int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("from_hex: invalid hex character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

}  // namespace chainlearn
