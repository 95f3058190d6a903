#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chainlearn {

/// Deterministic random stream. The raw generator is std::mt19937_64 (its
/// output sequence is fixed by the standard); every distribution on top is
/// implemented here rather than with std:: distributions, whose algorithms
/// are implementation-defined. Identical seeds therefore produce identical
/// draws on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be >= 1. Rejection sampled,
    /// so there is no modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

    bool next_bernoulli(double p) { return next_unit() < p; }

    /// Exp(1).
    double next_exponential();

    /// N(0, 1) via the Marsaglia polar method.
    double next_normal();

    /// Gamma(shape, 1), shape > 0. Marsaglia-Tsang for shape >= 1, boosted
    /// by U^(1/shape) below 1.
    double next_gamma(double shape);

private:
    std::mt19937_64 gen_;
};

/// Splits one root seed into independent stream seeds. The derivation is
/// SHA-256 over (root_seed || tag || a || b), integers big-endian, taking the
/// first 8 digest bytes as a big-endian u64. Streams keyed by distinct
/// (tag, a, b) never share draws, so adding a participant or a round does not
/// perturb any other stream.
std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0);

}  // namespace chainlearn
