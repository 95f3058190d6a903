#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chainlearn {

using Bytes = std::vector<std::uint8_t>;

/// Append-only writer for the project's canonical wire encodings.
/// Multi-byte integers are big-endian unless the method says otherwise.
class ByteWriter {
public:
    void put_u8(std::uint8_t v) { out_.push_back(v); }

    void put_u32_be(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8)
            out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }

    void put_u64_be(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8)
            out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }

    // IEEE-754 binary64 bit pattern, little-endian byte order.
    void put_f64_le(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int shift = 0; shift <= 56; shift += 8)
            out_.push_back(static_cast<std::uint8_t>(bits >> shift));
    }

    void put_bytes(std::span<const std::uint8_t> data) {
        out_.insert(out_.end(), data.begin(), data.end());
    }

    void put_string(std::string_view s) {
        out_.insert(out_.end(), s.begin(), s.end());
    }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);  // throws std::invalid_argument on bad input

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
    const Bytes raw = from_hex(hex);
    if (raw.size() != N)
        throw std::invalid_argument("hex string does not decode to " + std::to_string(N) + " bytes");
    std::array<std::uint8_t, N> out{};
    std::memcpy(out.data(), raw.data(), N);
    return out;
}

}  // namespace chainlearn
