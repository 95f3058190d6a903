#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "chainlearn/bytes.hpp"
#include "chainlearn/capacity.hpp"
#include "chainlearn/secp256k1.hpp"
#include "chainlearn/sha256.hpp"

namespace chainlearn {

/// 20-byte participant identity: the trailing 20 bytes of SHA-256 over the
/// uncompressed public key (x || y). SHA-256 is used for every digest in
/// this codebase, including here where Ethereum proper would use keccak.
using Address = std::array<std::uint8_t, 20>;

using RecoverableSignature = std::array<std::uint8_t, 65>;  // r(32) || s(32) || recovery id

struct SignedBenchmark {
    BenchmarkReport report;
    Hash256 benchmark_hash{};  // sha256(pack_benchmark(report))
    RecoverableSignature signature{};
};

/// Canonical 17-byte benchmark encoding, fixed for the wire:
///   bytes 0..7   throughput scaled by 1000 (samples/ms precision, rounded
///                half-up), unsigned big-endian
///   bytes 8..11  steps, unsigned big-endian
///   bytes 12..15 batch size, unsigned big-endian
///   byte  16     capacity class (0 weak, 1 medium, 2 strong)
/// Injective on valid reports. Throws std::invalid_argument on reports that
/// break their invariants and std::overflow_error when the scaled
/// throughput exceeds 8 bytes.
Bytes pack_benchmark(const BenchmarkReport& report);

Hash256 hash_benchmark(const BenchmarkReport& report);

/// sha256("\x19Ethereum Signed Message:\n32" || hash): the personal-message
/// envelope applied to every benchmark hash before signing or recovery.
Hash256 prefixed_message_hash(const Hash256& hash);

/// secp256k1 signing key. Value type; copies are independent.
class SigningKey {
public:
    static SigningKey from_bytes(const secp256k1::Scalar32& bytes);  // throws on invalid scalar
    /// Reads a 32-byte key as 64 hex characters (surrounding whitespace
    /// tolerated) from a file.
    static SigningKey from_hex_file(const std::filesystem::path& path);

    const secp256k1::Scalar32& bytes() const { return bytes_; }
    secp256k1::PublicKey64 public_key() const;
    Address address() const;

private:
    explicit SigningKey(const secp256k1::Scalar32& bytes) : bytes_(bytes) {}
    secp256k1::Scalar32 bytes_;
};

Address address_from_public_key(const secp256k1::PublicKey64& public_key);

/// Signs the prefixed envelope of `benchmark_hash` with deterministic
/// (RFC 6979) nonces; repeated calls return identical bytes.
RecoverableSignature sign_benchmark(const Hash256& benchmark_hash, const SigningKey& key);

/// Recovers the signer address from a benchmark hash and its recoverable
/// signature. Throws std::invalid_argument on malformed signatures.
Address recover_signer(const Hash256& benchmark_hash, const RecoverableSignature& signature);

SignedBenchmark make_signed_benchmark(const BenchmarkReport& report, const SigningKey& key);

}  // namespace chainlearn
