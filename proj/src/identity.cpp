#include "chainlearn/identity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chainlearn {

namespace {

constexpr std::string_view kMessagePrefix = "\x19"
                                            "Ethereum Signed Message:\n32";

// Largest throughput whose x1000 scaling still fits an unsigned 64-bit word.
constexpr double kMaxThroughput = 1.8446744073709550e16;

}  // namespace

Bytes pack_benchmark(const BenchmarkReport& report) {
    if (!(report.throughput >= 0.0))
        throw std::invalid_argument("pack_benchmark: throughput must be >= 0");
    if (report.steps < 1)
        throw std::invalid_argument("pack_benchmark: steps must be >= 1");
    if (report.batch_size < 1)
        throw std::invalid_argument("pack_benchmark: batch_size must be >= 1");
    if (report.throughput > kMaxThroughput)
        throw std::overflow_error("pack_benchmark: scaled throughput exceeds 8 bytes");

    // Round half-up at samples/millisecond precision.
    const long double scaled = static_cast<long double>(report.throughput) * 1000.0L;
    const auto milli = static_cast<std::uint64_t>(scaled + 0.5L);

    ByteWriter w;
    w.put_u64_be(milli);
    w.put_u32_be(report.steps);
    w.put_u32_be(report.batch_size);
    w.put_u8(static_cast<std::uint8_t>(report.declared_capacity));
    return w.take();
}

Hash256 hash_benchmark(const BenchmarkReport& report) {
    return sha256(pack_benchmark(report));
}

Hash256 prefixed_message_hash(const Hash256& hash) {
    ByteWriter w;
    w.put_string(kMessagePrefix);
    w.put_bytes(hash);
    return sha256(w.bytes());
}

SigningKey SigningKey::from_bytes(const secp256k1::Scalar32& bytes) {
    if (!secp256k1::is_valid_secret_key(bytes))
        throw std::invalid_argument("SigningKey: scalar out of range for secp256k1");
    return SigningKey(bytes);
}

SigningKey SigningKey::from_hex_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("SigningKey: cannot open key file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string hex = buffer.str();
    std::erase_if(hex, [](unsigned char c) { return std::isspace(c) != 0; });
    return from_bytes(array_from_hex<32>(hex));
}

secp256k1::PublicKey64 SigningKey::public_key() const {
    return secp256k1::derive_public_key(bytes_);
}

Address SigningKey::address() const {
    return address_from_public_key(public_key());
}

Address address_from_public_key(const secp256k1::PublicKey64& public_key) {
    const Hash256 digest = sha256(public_key);
    Address addr{};
    std::copy(digest.begin() + 12, digest.end(), addr.begin());
    return addr;
}

RecoverableSignature sign_benchmark(const Hash256& benchmark_hash, const SigningKey& key) {
    const secp256k1::Signature sig =
        secp256k1::sign(prefixed_message_hash(benchmark_hash), key.bytes());
    RecoverableSignature out{};
    std::copy(sig.r.begin(), sig.r.end(), out.begin());
    std::copy(sig.s.begin(), sig.s.end(), out.begin() + 32);
    out[64] = sig.recovery_id;
    return out;
}

Address recover_signer(const Hash256& benchmark_hash, const RecoverableSignature& signature) {
    secp256k1::Signature sig;
    std::copy(signature.begin(), signature.begin() + 32, sig.r.begin());
    std::copy(signature.begin() + 32, signature.begin() + 64, sig.s.begin());
    sig.recovery_id = signature[64];
    return address_from_public_key(
        secp256k1::recover(prefixed_message_hash(benchmark_hash), sig));
}

SignedBenchmark make_signed_benchmark(const BenchmarkReport& report, const SigningKey& key) {
    SignedBenchmark out;
    out.report = report;
    out.benchmark_hash = hash_benchmark(report);
    out.signature = sign_benchmark(out.benchmark_hash, key);
    return out;
}

}  // namespace chainlearn
