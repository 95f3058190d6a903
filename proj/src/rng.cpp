#include "chainlearn/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chainlearn/bytes.hpp"
#include "chainlearn/sha256.hpp"

namespace chainlearn {

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("next_below: bound must be >= 1");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t x = gen_();
        if (x < limit) return x % bound;
    }
}

double RngStream::next_exponential() {
    // 1 - u is in (0, 1], so the log is finite.
    return -std::log(1.0 - next_unit());
}

double RngStream::next_normal() {
    for (;;) {
        const double u = 2.0 * next_unit() - 1.0;
        const double v = 2.0 * next_unit() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0)
            return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double RngStream::next_gamma(double shape) {
    if (!(shape > 0.0))
        throw std::invalid_argument("next_gamma: shape must be > 0");
    if (shape < 1.0) {
        const double u = next_unit();
        return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::string_view tag,
                                 std::uint64_t a, std::uint64_t b) {
    ByteWriter w;
    w.put_u64_be(root_seed);
    w.put_string(tag);
    w.put_u64_be(a);
    w.put_u64_be(b);
    const Hash256 digest = sha256(w.bytes());
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) seed = (seed << 8) | digest[static_cast<std::size_t>(i)];
    return seed;
}

}  // namespace chainlearn
