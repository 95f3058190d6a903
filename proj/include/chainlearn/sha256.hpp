#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace chainlearn {

using Hash256 = std::array<std::uint8_t, 32>;

Hash256 sha256(std::span<const std::uint8_t> data);
Hash256 sha256(std::string_view data);

/// HMAC-SHA256 per RFC 2104.
Hash256 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);

}  // namespace chainlearn
