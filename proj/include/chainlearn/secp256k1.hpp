#pragma once

#include <array>
#include <cstdint>

namespace chainlearn::secp256k1 {

using Scalar32 = std::array<std::uint8_t, 32>;
using PublicKey64 = std::array<std::uint8_t, 64>;  // uncompressed x || y, big-endian

/// Canonical recoverable ECDSA signature: s is always the low form
/// (s <= n/2) and recovery_id identifies the nonce point (bit 0: y parity,
/// bit 1: r overflowed the group order).
struct Signature {
    Scalar32 r{};
    Scalar32 s{};
    std::uint8_t recovery_id = 0;
};

bool is_valid_secret_key(const Scalar32& secret_key);

PublicKey64 derive_public_key(const Scalar32& secret_key);  // throws on invalid key

/// Deterministic ECDSA over secp256k1 with RFC 6979 (HMAC-SHA256) nonces.
/// Identical (digest, key) pairs always produce identical signatures.
Signature sign(const Scalar32& digest, const Scalar32& secret_key);

/// Recovers the public key that produced `sig` over `digest`. Throws
/// std::invalid_argument for malformed signatures (r or s out of range,
/// high-s, recovery_id > 3) and points that do not exist on the curve.
PublicKey64 recover(const Scalar32& digest, const Signature& sig);

}  // namespace chainlearn::secp256k1
