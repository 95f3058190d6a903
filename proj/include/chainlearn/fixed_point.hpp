#pragma once

#include <cstdint>

#include "chainlearn/capacity.hpp"

namespace chainlearn {

/// Integer scalar scaled by PolicyConstants::scale. Confidence, calibration
/// error and weights all live in this representation; policy arithmetic never
/// touches floating point.
using Fixed = std::int64_t;

struct PolicyConstants {
    std::int64_t scale = 10'000;
    std::int64_t max_weight = 15'000;
    std::int64_t mult_weak = 8'000;
    std::int64_t mult_medium = 10'000;
    std::int64_t mult_strong = 12'000;
    std::int64_t bonus_per_round = 500;
    std::int64_t bonus_cap = 2'500;

    /// Throws std::invalid_argument when the constants break their
    /// invariants (ordering, positivity, bonus_cap divisibility) or are
    /// large enough to overflow the 128-bit intermediate product.
    void validate() const;

    bool operator==(const PolicyConstants&) const = default;
};

struct ReliabilityTuple {
    Fixed confidence = 0;                    // 0..scale
    Fixed ece = 0;                           // 0..scale
    std::uint64_t rounds_participated = 0;

    bool operator==(const ReliabilityTuple&) const = default;
};

/// Which factor of the weight formula is neutralized. Full is the identity
/// variant. Capacity-proof removal is a federation-level switch (it changes
/// who gets admitted, not the formula) and has no variant here.
enum class AblationVariant { Full, NoCapMul, NoConf, NoEce, NoBonus };

/// min(bonus_per_round * rounds, bonus_cap). Never overflows.
Fixed participation_bonus(std::uint64_t rounds, const PolicyConstants& consts);

std::int64_t capacity_multiplier(CapacityClass capacity, const PolicyConstants& consts);

/// Deterministic weight:
///   min( floor(M * C * (scale - E) / scale^2) + bonus, max_weight )
/// Multiplication happens before the single truncating division, on 128-bit
/// intermediates, matching what a contract VM would compute word-for-word.
/// Throws ProtocolError(InvalidReliability) when C or E are outside
/// [0, scale] rather than clamping; dishonest metrics should fail loudly.
Fixed calculate_weight(CapacityClass capacity, const ReliabilityTuple& rel,
                       const PolicyConstants& consts);

/// Same formula with one factor neutralized: NoCapMul sets M = scale,
/// NoConf sets C = scale, NoEce sets E = 0, NoBonus drops the bonus.
/// Input validation is identical to calculate_weight.
Fixed ablated_weight(AblationVariant variant, CapacityClass capacity,
                     const ReliabilityTuple& rel, const PolicyConstants& consts);

}  // namespace chainlearn
