#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "chainlearn/identity.hpp"
#include "chainlearn/rng.hpp"
#include "chainlearn/secp256k1.hpp"

using namespace chainlearn;

namespace {

secp256k1::Scalar32 key_bytes(std::uint8_t last) {
    secp256k1::Scalar32 k{};
    k[31] = last;
    return k;
}

BenchmarkReport make_report(double t, std::uint32_t steps, std::uint32_t batch,
                            CapacityClass cap) {
    BenchmarkReport r;
    r.throughput = t;
    r.steps = steps;
    r.batch_size = batch;
    r.declared_capacity = cap;
    return r;
}

}  // namespace

TEST_CASE("canonical packing layout") {
    const Bytes zero = pack_benchmark(make_report(0.0, 1, 1, CapacityClass::Weak));
    REQUIRE(zero.size() == 17);
    for (int i = 0; i < 8; ++i) CHECK(zero[static_cast<std::size_t>(i)] == 0);
    CHECK(zero.back() == 0x00);
    CHECK(to_hex(zero) == "0000000000000000000000010000000100");

    // 150.0 samples/s scales to 150000; 0x249f0.
    const Bytes packed = pack_benchmark(make_report(150.0, 10, 32, CapacityClass::Medium));
    CHECK(to_hex(packed) == "00000000000249f00000000a0000002001");
}

TEST_CASE("packing validates its inputs") {
    CHECK_THROWS_AS(pack_benchmark(make_report(-1.0, 1, 1, CapacityClass::Weak)),
                    std::invalid_argument);
    CHECK_THROWS_AS(pack_benchmark(make_report(1.0, 0, 1, CapacityClass::Weak)),
                    std::invalid_argument);
    CHECK_THROWS_AS(pack_benchmark(make_report(1.0, 1, 0, CapacityClass::Weak)),
                    std::invalid_argument);
    CHECK_THROWS_AS(pack_benchmark(make_report(1e18, 1, 1, CapacityClass::Weak)),
                    std::overflow_error);
}

TEST_CASE("benchmark hashing matches an external SHA-256 computation") {
    // Digests computed with an independent SHA-256 implementation.
    CHECK(to_hex(hash_benchmark(make_report(0.0, 1, 1, CapacityClass::Weak))) ==
          "ad4a031d3a8990d6df85d9d586d05acab662146df30a30193f1d6a54705996ca");
    CHECK(to_hex(hash_benchmark(make_report(150.0, 10, 32, CapacityClass::Medium))) ==
          "4bfe013697cb154a88ac4a7c2be0315150c3ef0190342e2bf0b6f64ae6ce5876");

    const BenchmarkReport a = make_report(150.0, 10, 32, CapacityClass::Medium);
    CHECK(hash_benchmark(a) == hash_benchmark(a));
    const BenchmarkReport flipped = make_report(150.0, 10, 32, CapacityClass::Strong);
    CHECK(hash_benchmark(a) != hash_benchmark(flipped));
}

TEST_CASE("field flips always change the digest") {
    RngStream rng(11);
    for (int i = 0; i < 200; ++i) {
        BenchmarkReport r;
        r.throughput = static_cast<double>(rng.next_below(1'000'000)) / 100.0;
        r.steps = static_cast<std::uint32_t>(rng.next_below(1000) + 1);
        r.batch_size = static_cast<std::uint32_t>(rng.next_below(512) + 1);
        r.declared_capacity = static_cast<CapacityClass>(rng.next_below(3));
        const Hash256 h = hash_benchmark(r);

        BenchmarkReport t = r;
        t.throughput = r.throughput + 0.001;  // one serialized milli-unit
        CHECK(hash_benchmark(t) != h);
        t = r;
        t.steps += 1;
        CHECK(hash_benchmark(t) != h);
        t = r;
        t.batch_size += 1;
        CHECK(hash_benchmark(t) != h);
        t = r;
        t.declared_capacity = static_cast<CapacityClass>(
            (static_cast<int>(r.declared_capacity) + 1) % 3);
        CHECK(hash_benchmark(t) != h);
    }
}

TEST_CASE("secp256k1 known-answer vector") {
    // Widely published deterministic-ECDSA vector: d = 1,
    // digest = sha256("Satoshi Nakamoto"), low-s normalized.
    const secp256k1::Scalar32 d = key_bytes(1);
    const Hash256 digest = sha256("Satoshi Nakamoto");
    const secp256k1::Signature sig = secp256k1::sign(digest, d);
    CHECK(to_hex(sig.r) == "934b1ea10a4b3c1757e2b0c017d0b6143ce3c9a7e6a4a49860d7a6ab210ee3d8");
    CHECK(to_hex(sig.s) == "2442ce9d2b916064108014783e923ec36b49743e2ffa1c4496f01a512aafd9e5");
    CHECK(sig.recovery_id == 1);
    CHECK(secp256k1::recover(digest, sig) == secp256k1::derive_public_key(d));
}

TEST_CASE("prefixed signing pipeline known-answer vector") {
    const SigningKey key = SigningKey::from_bytes(key_bytes(1));
    CHECK(to_hex(key.address()) == "b46a7a1a23f3897cc83a94521a96da5c23bc58db");

    const BenchmarkReport report = make_report(150.0, 10, 32, CapacityClass::Medium);
    const Hash256 h = hash_benchmark(report);
    const RecoverableSignature sig = sign_benchmark(h, key);
    CHECK(to_hex(std::span(sig).first(32)) ==
          "5620ab692b0ca3e35dbb557c22470f4990a90ba992badb2bb1dc457effdfb74c");
    CHECK(to_hex(std::span(sig).subspan(32, 32)) ==
          "6253d0c5cecdbc81de1b4f68ab7d98c2ecc49c9339622cdfdc18b4e9a915b193");
    CHECK(sig[64] == 0);
    CHECK(recover_signer(h, sig) == key.address());
}

TEST_CASE("sign/recover round-trip over random keys and reports") {
    RngStream rng(23);
    for (int i = 0; i < 25; ++i) {
        secp256k1::Scalar32 kb{};
        for (auto& b : kb) b = static_cast<std::uint8_t>(rng.next_below(256));
        if (!secp256k1::is_valid_secret_key(kb)) continue;
        const SigningKey key = SigningKey::from_bytes(kb);

        BenchmarkReport r = make_report(static_cast<double>(rng.next_below(100000)) / 10.0,
                                        static_cast<std::uint32_t>(rng.next_below(100) + 1),
                                        static_cast<std::uint32_t>(rng.next_below(100) + 1),
                                        static_cast<CapacityClass>(rng.next_below(3)));
        const SignedBenchmark sb = make_signed_benchmark(r, key);
        CHECK(recover_signer(sb.benchmark_hash, sb.signature) == key.address());

        // Re-signing is bit-identical (deterministic nonces).
        CHECK(sign_benchmark(sb.benchmark_hash, key) == sb.signature);

        // Recovery under a different message yields a different signer.
        Hash256 other = sb.benchmark_hash;
        other[0] ^= 0x01;
        CHECK(recover_signer(other, sb.signature) != key.address());
    }
}

TEST_CASE("malformed signatures are rejected") {
    const SigningKey key = SigningKey::from_bytes(key_bytes(2));
    const Hash256 h = sha256("payload");
    RecoverableSignature sig = sign_benchmark(h, key);

    RecoverableSignature bad = sig;
    bad[64] = 7;  // recovery id out of range
    CHECK_THROWS_AS(recover_signer(h, bad), std::invalid_argument);

    bad = sig;
    for (int i = 0; i < 32; ++i) bad[static_cast<std::size_t>(i)] = 0;  // r = 0
    CHECK_THROWS_AS(recover_signer(h, bad), std::invalid_argument);

    bad = sig;
    for (int i = 32; i < 64; ++i) bad[static_cast<std::size_t>(i)] = 0xff;  // s > n
    CHECK_THROWS_AS(recover_signer(h, bad), std::invalid_argument);

    // a valid-range but non-canonical high s (n - 1)
    bad = sig;
    const auto high_s =
        array_from_hex<32>("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364140");
    std::copy(high_s.begin(), high_s.end(), bad.begin() + 32);
    CHECK_THROWS_AS(recover_signer(h, bad), std::invalid_argument);
}

TEST_CASE("invalid secret keys are rejected") {
    CHECK_THROWS_AS(SigningKey::from_bytes(key_bytes(0)), std::invalid_argument);
    secp256k1::Scalar32 over{};
    over.fill(0xff);  // beyond the group order
    CHECK_THROWS_AS(SigningKey::from_bytes(over), std::invalid_argument);
}

TEST_CASE("key material loads from a hex file") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "chainlearn_test_key.hex";
    {
        std::ofstream out(path);
        out << "  0000000000000000000000000000000000000000000000000000000000000001\n";
    }
    const SigningKey key = SigningKey::from_hex_file(path);
    CHECK(to_hex(key.address()) == "b46a7a1a23f3897cc83a94521a96da5c23bc58db");

    {
        std::ofstream out(path);
        out << "zz";
    }
    CHECK_THROWS_AS(SigningKey::from_hex_file(path), std::invalid_argument);
    fs::remove(path);
}
