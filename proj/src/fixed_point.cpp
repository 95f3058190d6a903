#include "chainlearn/fixed_point.hpp"

#include <stdexcept>
#include <string>

#include "chainlearn/errors.hpp"

namespace chainlearn {

namespace {

// Bound keeping m * C * (scale - E) within __int128 (1e9^3 = 1e27 << 2^126).
constexpr std::int64_t kMaxConstant = 1'000'000'000;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("PolicyConstants: ") + what);
}

}  // namespace

void PolicyConstants::validate() const {
    require(scale > 0 && scale <= kMaxConstant, "scale must be in [1, 1e9]");
    require(mult_weak > 0 && mult_strong <= kMaxConstant, "multipliers must be in [1, 1e9]");
    require(mult_weak < mult_medium && mult_medium < mult_strong,
            "multipliers must be strictly increasing weak < medium < strong");
    require(max_weight >= mult_strong, "max_weight must be >= the largest multiplier");
    require(bonus_per_round >= 0 && bonus_per_round <= kMaxConstant,
            "bonus_per_round must be in [0, 1e9]");
    require(bonus_cap >= 0 && bonus_cap <= kMaxConstant, "bonus_cap must be in [0, 1e9]");
    if (bonus_per_round > 0)
        require(bonus_cap % bonus_per_round == 0,
                "bonus_cap must be an integer multiple of bonus_per_round");
}

Fixed participation_bonus(std::uint64_t rounds, const PolicyConstants& consts) {
    consts.validate();
    if (consts.bonus_per_round == 0) return 0;
    const std::uint64_t cap_rounds =
        static_cast<std::uint64_t>(consts.bonus_cap / consts.bonus_per_round);
    if (rounds >= cap_rounds) return consts.bonus_cap;
    return consts.bonus_per_round * static_cast<std::int64_t>(rounds);
}

std::int64_t capacity_multiplier(CapacityClass capacity, const PolicyConstants& consts) {
    consts.validate();
    switch (capacity) {
        case CapacityClass::Weak: return consts.mult_weak;
        case CapacityClass::Medium: return consts.mult_medium;
        case CapacityClass::Strong: return consts.mult_strong;
    }
    throw std::invalid_argument("capacity_multiplier: invalid capacity class");
}

namespace {

Fixed weight_from_parts(std::int64_t multiplier, Fixed confidence, Fixed ece, Fixed bonus,
                        const PolicyConstants& consts) {
    using Wide = __int128;
    const Wide numerator =
        static_cast<Wide>(multiplier) * static_cast<Wide>(confidence) *
        static_cast<Wide>(consts.scale - ece);
    const Wide denominator = static_cast<Wide>(consts.scale) * static_cast<Wide>(consts.scale);
    // Non-negative operands, so / truncates toward zero exactly like floor.
    const Wide base = numerator / denominator;
    const Wide weight = base + static_cast<Wide>(bonus);
    const Wide cap = static_cast<Wide>(consts.max_weight);
    return static_cast<Fixed>(weight < cap ? weight : cap);
}

void check_reliability(const ReliabilityTuple& rel, const PolicyConstants& consts) {
    if (rel.confidence < 0 || rel.confidence > consts.scale)
        throw ProtocolError(RejectReason::InvalidReliability,
                            "confidence " + std::to_string(rel.confidence) +
                                " outside [0, " + std::to_string(consts.scale) + "]");
    if (rel.ece < 0 || rel.ece > consts.scale)
        throw ProtocolError(RejectReason::InvalidReliability,
                            "ece " + std::to_string(rel.ece) + " outside [0, " +
                                std::to_string(consts.scale) + "]");
}

}  // namespace

Fixed calculate_weight(CapacityClass capacity, const ReliabilityTuple& rel,
                       const PolicyConstants& consts) {
    consts.validate();
    check_reliability(rel, consts);
    return weight_from_parts(capacity_multiplier(capacity, consts), rel.confidence, rel.ece,
                             participation_bonus(rel.rounds_participated, consts), consts);
}

Fixed ablated_weight(AblationVariant variant, CapacityClass capacity,
                     const ReliabilityTuple& rel, const PolicyConstants& consts) {
    consts.validate();
    check_reliability(rel, consts);

    std::int64_t multiplier = capacity_multiplier(capacity, consts);
    Fixed confidence = rel.confidence;
    Fixed ece = rel.ece;
    Fixed bonus = participation_bonus(rel.rounds_participated, consts);

    switch (variant) {
        case AblationVariant::Full: break;
        case AblationVariant::NoCapMul: multiplier = consts.scale; break;
        case AblationVariant::NoConf: confidence = consts.scale; break;
        case AblationVariant::NoEce: ece = 0; break;
        case AblationVariant::NoBonus: bonus = 0; break;
    }
    return weight_from_parts(multiplier, confidence, ece, bonus, consts);
}

}  // namespace chainlearn
