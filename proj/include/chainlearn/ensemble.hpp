#pragma once

#include <cstdint>
#include <vector>

#include "chainlearn/fixed_point.hpp"

namespace chainlearn {

/// Per-input class distribution: entries in [0, 1] summing to 1 (within
/// 1e-9). The unit of off-chain aggregation.
using ProbabilityVector = std::vector<double>;

struct PredictionBatch {
    std::vector<ProbabilityVector> probabilities;
    std::vector<std::size_t> labels;  // same length, each < class count

    std::size_t size() const { return probabilities.size(); }
    std::size_t class_count() const {
        return probabilities.empty() ? 0 : probabilities.front().size();
    }
};

struct EceConfig {
    std::size_t bin_count = 15;
};

bool is_probability_vector(const ProbabilityVector& v, double sum_tolerance = 1e-9);

/// Lowest index wins ties.
std::size_t argmax_class(const ProbabilityVector& v);

/// Convex combination sum(W_i * P_i) / sum(W_i) of one output vector per
/// member. Throws std::invalid_argument on length mismatches and when the
/// total weight is zero. A single member is returned bit-identically.
ProbabilityVector weighted_aggregate(const std::vector<ProbabilityVector>& member_outputs,
                                     const std::vector<Fixed>& weights);

/// Top-1 accuracy. Throws std::invalid_argument on an empty batch.
double accuracy(const PredictionBatch& batch);

/// Unweighted mean of per-class F1; a class with zero precision+recall
/// contributes 0 (the 0/0 convention), which matters on small skewed
/// batches.
double macro_f1(const PredictionBatch& batch);

/// Expected calibration error over equal-width confidence bins on (0, 1].
/// A max-probability exactly on a bin edge falls into the lower bin; 1.0
/// falls into the top bin. Empty bins contribute nothing.
double expected_calibration_error(const PredictionBatch& batch, const EceConfig& cfg = {});

/// Mean max-probability over the batch.
double mean_confidence(const PredictionBatch& batch);

/// Round-half-up of x * scale, clamped to [0, scale]. Throws on x outside
/// [0, 1].
Fixed to_fixed_point(double x, std::int64_t scale);

}  // namespace chainlearn
