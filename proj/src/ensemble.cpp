#include "chainlearn/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chainlearn {

namespace {

void check_batch(const PredictionBatch& batch) {
    if (batch.probabilities.empty())
        throw std::invalid_argument("prediction batch is empty");
    if (batch.labels.size() != batch.probabilities.size())
        throw std::invalid_argument("prediction batch: labels/probabilities length mismatch");
    const std::size_t classes = batch.probabilities.front().size();
    if (classes == 0)
        throw std::invalid_argument("prediction batch: zero classes");
    for (const auto& v : batch.probabilities)
        if (v.size() != classes)
            throw std::invalid_argument("prediction batch: ragged probability vectors");
    for (const std::size_t label : batch.labels)
        if (label >= classes)
            throw std::invalid_argument("prediction batch: label out of range");
}

}  // namespace

bool is_probability_vector(const ProbabilityVector& v, double sum_tolerance) {
    if (v.empty()) return false;
    double sum = 0.0;
    for (const double p : v) {
        if (!(p >= 0.0 && p <= 1.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= sum_tolerance;
}

std::size_t argmax_class(const ProbabilityVector& v) {
    if (v.empty()) throw std::invalid_argument("argmax_class: empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

ProbabilityVector weighted_aggregate(const std::vector<ProbabilityVector>& member_outputs,
                                     const std::vector<Fixed>& weights) {
    if (member_outputs.empty())
        throw std::invalid_argument("weighted_aggregate: no member outputs");
    if (member_outputs.size() != weights.size())
        throw std::invalid_argument("weighted_aggregate: outputs/weights length mismatch");

    const std::size_t classes = member_outputs.front().size();
    if (classes == 0)
        throw std::invalid_argument("weighted_aggregate: zero classes");
    for (const auto& v : member_outputs)
        if (v.size() != classes)
            throw std::invalid_argument("weighted_aggregate: member output length mismatch");

    std::int64_t total = 0;
    for (const Fixed w : weights) {
        if (w < 0)
            throw std::invalid_argument("weighted_aggregate: negative weight");
        total += w;
    }
    if (total == 0)
        throw std::invalid_argument("weighted_aggregate: total weight is zero");

    ProbabilityVector out(classes, 0.0);
    for (std::size_t m = 0; m < member_outputs.size(); ++m) {
        // coefficient form keeps a single member an exact identity
        const double coeff =
            static_cast<double>(weights[m]) / static_cast<double>(total);
        if (coeff == 0.0) continue;
        for (std::size_t c = 0; c < classes; ++c)
            out[c] += coeff * member_outputs[m][c];
    }
    return out;
}

double accuracy(const PredictionBatch& batch) {
    check_batch(batch);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (argmax_class(batch.probabilities[i]) == batch.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(batch.size());
}

double macro_f1(const PredictionBatch& batch) {
    check_batch(batch);
    const std::size_t classes = batch.class_count();
    std::vector<std::size_t> tp(classes, 0);
    std::vector<std::size_t> fp(classes, 0);
    std::vector<std::size_t> fn(classes, 0);

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::size_t predicted = argmax_class(batch.probabilities[i]);
        const std::size_t truth = batch.labels[i];
        if (predicted == truth) {
            ++tp[truth];
        } else {
            ++fp[predicted];
            ++fn[truth];
        }
    }

    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        const double p_den = static_cast<double>(tp[c] + fp[c]);
        const double r_den = static_cast<double>(tp[c] + fn[c]);
        const double precision = p_den > 0.0 ? static_cast<double>(tp[c]) / p_den : 0.0;
        const double recall = r_den > 0.0 ? static_cast<double>(tp[c]) / r_den : 0.0;
        if (precision + recall > 0.0)
            sum += 2.0 * precision * recall / (precision + recall);
    }
    return sum / static_cast<double>(classes);
}

double expected_calibration_error(const PredictionBatch& batch, const EceConfig& cfg) {
    check_batch(batch);
    if (cfg.bin_count < 1)
        throw std::invalid_argument("expected_calibration_error: bin_count must be >= 1");

    const std::size_t bins = cfg.bin_count;
    std::vector<std::size_t> count(bins, 0);
    std::vector<double> conf_sum(bins, 0.0);
    std::vector<std::size_t> correct(bins, 0);

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::size_t predicted = argmax_class(batch.probabilities[i]);
        const double conf = batch.probabilities[i][predicted];
        // edge values belong to the lower bin; 1.0 lands in the top bin
        std::size_t bin = 0;
        const double scaled = conf * static_cast<double>(bins);
        if (scaled > 0.0) {
            const double up = std::ceil(scaled);
            bin = static_cast<std::size_t>(up) - 1;
            if (bin >= bins) bin = bins - 1;
        }
        ++count[bin];
        conf_sum[bin] += conf;
        if (predicted == batch.labels[i]) ++correct[bin];
    }

    double ece = 0.0;
    const double n = static_cast<double>(batch.size());
    for (std::size_t b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        const double bin_n = static_cast<double>(count[b]);
        const double acc = static_cast<double>(correct[b]) / bin_n;
        const double conf = conf_sum[b] / bin_n;
        ece += (bin_n / n) * std::abs(acc - conf);
    }
    return ece;
}

double mean_confidence(const PredictionBatch& batch) {
    check_batch(batch);
    double sum = 0.0;
    for (const auto& v : batch.probabilities) sum += v[argmax_class(v)];
    return sum / static_cast<double>(batch.size());
}

Fixed to_fixed_point(double x, std::int64_t scale) {
    if (scale <= 0)
        throw std::invalid_argument("to_fixed_point: scale must be > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("to_fixed_point: value " + std::to_string(x) +
                                    " outside [0, 1]");
    const double scaled = x * static_cast<double>(scale);
    auto fixed = static_cast<Fixed>(std::floor(scaled + 0.5));
    if (fixed < 0) fixed = 0;
    if (fixed > scale) fixed = scale;
    return fixed;
}

}  // namespace chainlearn
