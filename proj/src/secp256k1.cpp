#include "chainlearn/secp256k1.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>

#include "chainlearn/bytes.hpp"
#include "chainlearn/sha256.hpp"

namespace chainlearn::secp256k1 {

namespace {

using boost::multiprecision::cpp_int;

// y^2 = x^3 + 7 over F_p.
const cpp_int kP("0xfffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f");
const cpp_int kN("0xfffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141");
const cpp_int kGx("0x79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
const cpp_int kGy("0x483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8");

cpp_int mod(const cpp_int& a, const cpp_int& m) {
    cpp_int r = a % m;
    if (r < 0) r += m;
    return r;
}

cpp_int mod_inv(const cpp_int& a, const cpp_int& m) {
    // m is prime throughout this file.
    return boost::multiprecision::powm(mod(a, m), m - 2, m);
}

cpp_int from_bytes(const Scalar32& bytes) {
    cpp_int x = 0;
    for (const std::uint8_t b : bytes) x = (x << 8) | b;
    return x;
}

Scalar32 to_bytes32(const cpp_int& x) {
    Scalar32 out{};
    cpp_int v = x;
    for (int i = 31; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    if (v != 0) throw std::overflow_error("secp256k1: value exceeds 32 bytes");
    return out;
}

struct Affine {
    cpp_int x;
    cpp_int y;
    bool infinity = true;
};

// Jacobian coordinates; Z == 0 marks the point at infinity.
struct Jacobian {
    cpp_int X{0};
    cpp_int Y{1};
    cpp_int Z{0};
};

Jacobian to_jacobian(const Affine& p) {
    if (p.infinity) return {};
    return {p.x, p.y, 1};
}

Affine to_affine(const Jacobian& p) {
    if (p.Z == 0) return {};
    const cpp_int zi = mod_inv(p.Z, kP);
    const cpp_int zi2 = mod(zi * zi, kP);
    return {mod(p.X * zi2, kP), mod(p.Y * zi2 * zi, kP), false};
}

Jacobian jacobian_double(const Jacobian& p) {
    if (p.Z == 0 || p.Y == 0) return {};
    const cpp_int a = mod(p.X * p.X, kP);
    const cpp_int b = mod(p.Y * p.Y, kP);
    const cpp_int c = mod(b * b, kP);
    cpp_int d = mod((p.X + b) * (p.X + b) - a - c, kP);
    d = mod(2 * d, kP);
    const cpp_int e = mod(3 * a, kP);
    const cpp_int f = mod(e * e, kP);
    const cpp_int x3 = mod(f - 2 * d, kP);
    const cpp_int y3 = mod(e * (d - x3) - 8 * c, kP);
    const cpp_int z3 = mod(2 * p.Y * p.Z, kP);
    return {x3, y3, z3};
}

Jacobian jacobian_add(const Jacobian& p, const Jacobian& q) {
    if (p.Z == 0) return q;
    if (q.Z == 0) return p;
    const cpp_int z1z1 = mod(p.Z * p.Z, kP);
    const cpp_int z2z2 = mod(q.Z * q.Z, kP);
    const cpp_int u1 = mod(p.X * z2z2, kP);
    const cpp_int u2 = mod(q.X * z1z1, kP);
    const cpp_int s1 = mod(p.Y * z2z2 * q.Z, kP);
    const cpp_int s2 = mod(q.Y * z1z1 * p.Z, kP);
    if (u1 == u2) {
        if (s1 != s2) return {};  // inverses: P + (-P)
        return jacobian_double(p);
    }
    const cpp_int h = mod(u2 - u1, kP);
    const cpp_int h2 = mod(h * h, kP);
    const cpp_int h3 = mod(h2 * h, kP);
    const cpp_int r = mod(s2 - s1, kP);
    const cpp_int x3 = mod(r * r - h3 - 2 * u1 * h2, kP);
    const cpp_int y3 = mod(r * (u1 * h2 - x3) - s1 * h3, kP);
    const cpp_int z3 = mod(p.Z * q.Z * h, kP);
    return {x3, y3, z3};
}

Jacobian scalar_mul(const cpp_int& k, const Affine& p) {
    Jacobian result;
    if (p.infinity || k == 0) return result;
    const Jacobian base = to_jacobian(p);
    const std::size_t bits = boost::multiprecision::msb(k) + 1;
    for (std::size_t i = bits; i-- > 0;) {
        result = jacobian_double(result);
        if (boost::multiprecision::bit_test(k, static_cast<unsigned>(i)))
            result = jacobian_add(result, base);
    }
    return result;
}

const Affine kG{kGx, kGy, false};

// RFC 6979 HMAC-SHA256 nonce generator; next() yields successive candidates
// so the retry loop for degenerate r/s continues the stream as specified.
class NonceGenerator {
public:
    NonceGenerator(const Scalar32& key, const Scalar32& digest_mod_n) {
        v_.fill(0x01);
        k_.fill(0x00);
        step(0x00, key, digest_mod_n);
        step(0x01, key, digest_mod_n);
    }

    cpp_int next() {
        for (;;) {
            v_ = hmac_sha256(k_, v_);
            const cpp_int k = from_bytes(v_);
            if (k >= 1 && k < kN) return k;
            retune();
        }
    }

    void reject() { retune(); }

private:
    void step(std::uint8_t sep, const Scalar32& key, const Scalar32& digest) {
        ByteWriter w;
        w.put_bytes(v_);
        w.put_u8(sep);
        w.put_bytes(key);
        w.put_bytes(digest);
        k_ = hmac_sha256(k_, w.bytes());
        v_ = hmac_sha256(k_, v_);
    }

    void retune() {
        ByteWriter w;
        w.put_bytes(v_);
        w.put_u8(0x00);
        k_ = hmac_sha256(k_, w.bytes());
        v_ = hmac_sha256(k_, v_);
    }

    Hash256 v_{};
    Hash256 k_{};
};

PublicKey64 encode_point(const Affine& p) {
    if (p.infinity) throw std::invalid_argument("secp256k1: point at infinity");
    PublicKey64 out{};
    const Scalar32 x = to_bytes32(p.x);
    const Scalar32 y = to_bytes32(p.y);
    std::copy(x.begin(), x.end(), out.begin());
    std::copy(y.begin(), y.end(), out.begin() + 32);
    return out;
}

}  // namespace

bool is_valid_secret_key(const Scalar32& secret_key) {
    const cpp_int d = from_bytes(secret_key);
    return d >= 1 && d < kN;
}

PublicKey64 derive_public_key(const Scalar32& secret_key) {
    if (!is_valid_secret_key(secret_key))
        throw std::invalid_argument("secp256k1: secret key out of range");
    return encode_point(to_affine(scalar_mul(from_bytes(secret_key), kG)));
}

Signature sign(const Scalar32& digest, const Scalar32& secret_key) {
    if (!is_valid_secret_key(secret_key))
        throw std::invalid_argument("secp256k1: secret key out of range");

    const cpp_int d = from_bytes(secret_key);
    const cpp_int z = mod(from_bytes(digest), kN);
    NonceGenerator nonces(secret_key, to_bytes32(z));

    for (;;) {
        const cpp_int k = nonces.next();
        const Affine point = to_affine(scalar_mul(k, kG));
        const cpp_int r = mod(point.x, kN);
        if (r == 0) {
            nonces.reject();
            continue;
        }
        cpp_int s = mod(mod_inv(k, kN) * mod(z + r * d, kN), kN);
        if (s == 0) {
            nonces.reject();
            continue;
        }

        std::uint8_t recid = static_cast<std::uint8_t>(point.y & 1);
        if (point.x >= kN) recid |= 2;
        if (s > kN / 2) {
            s = kN - s;
            recid ^= 1;
        }
        return {to_bytes32(r), to_bytes32(s), recid};
    }
}

PublicKey64 recover(const Scalar32& digest, const Signature& sig) {
    if (sig.recovery_id > 3)
        throw std::invalid_argument("secp256k1: recovery id out of range");
    const cpp_int r = from_bytes(sig.r);
    const cpp_int s = from_bytes(sig.s);
    if (r < 1 || r >= kN) throw std::invalid_argument("secp256k1: r out of range");
    if (s < 1 || s >= kN) throw std::invalid_argument("secp256k1: s out of range");
    if (s > kN / 2) throw std::invalid_argument("secp256k1: non-canonical high-s signature");

    cpp_int x = r;
    if (sig.recovery_id & 2) x += kN;
    if (x >= kP) throw std::invalid_argument("secp256k1: recovered x exceeds field");

    // Lift x back onto the curve; p % 4 == 3 so a single powm finds the root.
    const cpp_int alpha = mod(x * x * x + 7, kP);
    cpp_int y = boost::multiprecision::powm(alpha, (kP + 1) / 4, kP);
    if (mod(y * y, kP) != alpha)
        throw std::invalid_argument("secp256k1: signature point not on curve");
    if (static_cast<std::uint8_t>(y & 1) != (sig.recovery_id & 1)) y = kP - y;

    const Affine nonce_point{x, y, false};
    const cpp_int z = mod(from_bytes(digest), kN);
    const cpp_int r_inv = mod_inv(r, kN);
    const cpp_int u1 = mod(-z * r_inv, kN);
    const cpp_int u2 = mod(s * r_inv, kN);

    const Jacobian q = jacobian_add(scalar_mul(u1, kG), scalar_mul(u2, nonce_point));
    const Affine result = to_affine(q);
    if (result.infinity)
        throw std::invalid_argument("secp256k1: recovery produced the point at infinity");
    return encode_point(result);
}

}  // namespace chainlearn::secp256k1
