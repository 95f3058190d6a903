#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chainlearn/ensemble.hpp"
#include "chainlearn/rng.hpp"

using namespace chainlearn;

namespace {

PredictionBatch random_batch(RngStream& rng, std::size_t n, std::size_t classes) {
    PredictionBatch batch;
    for (std::size_t i = 0; i < n; ++i) {
        ProbabilityVector v(classes);
        double sum = 0.0;
        for (auto& p : v) {
            p = rng.next_exponential();
            sum += p;
        }
        for (auto& p : v) p /= sum;
        batch.probabilities.push_back(std::move(v));
        batch.labels.push_back(rng.next_below(classes));
    }
    return batch;
}

// Re-binning oracle: scans the bin edges per sample and averages per bin
// from scratch, instead of the streaming accumulation in the library.
double ece_oracle(const PredictionBatch& batch, std::size_t bins) {
    std::vector<std::vector<std::size_t>> members(bins);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::size_t pred = argmax_class(batch.probabilities[i]);
        const double conf = batch.probabilities[i][pred];
        std::size_t bin = bins - 1;
        for (std::size_t b = 1; b <= bins; ++b) {
            if (conf <= static_cast<double>(b) / static_cast<double>(bins)) {
                bin = b - 1;
                break;
            }
        }
        members[bin].push_back(i);
    }
    double ece = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (members[b].empty()) continue;
        double conf = 0.0;
        double acc = 0.0;
        for (const std::size_t i : members[b]) {
            const std::size_t pred = argmax_class(batch.probabilities[i]);
            conf += batch.probabilities[i][pred];
            acc += pred == batch.labels[i] ? 1.0 : 0.0;
        }
        conf /= static_cast<double>(members[b].size());
        acc /= static_cast<double>(members[b].size());
        ece += static_cast<double>(members[b].size()) / static_cast<double>(batch.size()) *
               std::abs(acc - conf);
    }
    return ece;
}

// Confusion-matrix F1 oracle using the 2tp/(2tp+fp+fn) route.
double macro_f1_oracle(const PredictionBatch& batch) {
    const std::size_t classes = batch.class_count();
    std::vector<std::vector<std::size_t>> confusion(classes,
                                                    std::vector<std::size_t>(classes, 0));
    for (std::size_t i = 0; i < batch.size(); ++i)
        confusion[batch.labels[i]][argmax_class(batch.probabilities[i])] += 1;

    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        const std::size_t tp = confusion[c][c];
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (std::size_t o = 0; o < classes; ++o) {
            if (o == c) continue;
            fp += confusion[o][c];
            fn += confusion[c][o];
        }
        const std::size_t denom = 2 * tp + fp + fn;
        if (denom > 0)
            sum += 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    }
    return sum / static_cast<double>(classes);
}

PredictionBatch one_hot_batch(const std::vector<std::size_t>& predicted,
                              const std::vector<std::size_t>& labels, std::size_t classes) {
    PredictionBatch batch;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        ProbabilityVector v(classes, 0.0);
        v[predicted[i]] = 1.0;
        batch.probabilities.push_back(std::move(v));
    }
    batch.labels = labels;
    return batch;
}

}  // namespace

TEST_CASE("weighted aggregation worked examples") {
    // single participant: exact identity
    const ProbabilityVector p{0.3, 0.45, 0.25};
    const ProbabilityVector out = weighted_aggregate({p}, {1234});
    CHECK(out == p);

    // symmetry
    const ProbabilityVector mixed = weighted_aggregate({{1.0, 0.0}, {0.0, 1.0}}, {1, 1});
    CHECK(mixed[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mixed[1] == doctest::Approx(0.5).epsilon(1e-15));

    // (3*0.8 + 1*0.4) / 4 = 0.7
    const ProbabilityVector blended =
        weighted_aggregate({{0.8, 0.2}, {0.4, 0.6}}, {3, 1});
    CHECK(blended[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(blended[1] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("aggregation error paths") {
    CHECK_THROWS_AS(weighted_aggregate({{0.5, 0.5}, {1.0, 0.0}}, {0, 0}),
                    std::invalid_argument);  // zero total weight
    CHECK_THROWS_AS(weighted_aggregate({{0.5, 0.5}, {1.0}}, {1, 1}),
                    std::invalid_argument);  // ragged members
    CHECK_THROWS_AS(weighted_aggregate({{0.5, 0.5}}, {1, 1}),
                    std::invalid_argument);  // weight count mismatch
    CHECK_THROWS_AS(weighted_aggregate({}, {}), std::invalid_argument);
}

TEST_CASE("aggregation invariants over random inputs") {
    RngStream rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t members = 1 + rng.next_below(5);
        const std::size_t classes = 2 + rng.next_below(6);
        std::vector<ProbabilityVector> outputs;
        std::vector<Fixed> weights;
        for (std::size_t m = 0; m < members; ++m) {
            ProbabilityVector v(classes);
            double sum = 0.0;
            for (auto& p : v) {
                p = rng.next_exponential();
                sum += p;
            }
            for (auto& p : v) p /= sum;
            outputs.push_back(std::move(v));
            weights.push_back(static_cast<Fixed>(1 + rng.next_below(15000)));
        }

        const ProbabilityVector out = weighted_aggregate(outputs, weights);
        CHECK(is_probability_vector(out));

        // equal weights match the arithmetic mean
        std::vector<Fixed> equal(members, 7);
        const ProbabilityVector eq = weighted_aggregate(outputs, equal);
        for (std::size_t c = 0; c < classes; ++c) {
            double mean = 0.0;
            for (const auto& o : outputs) mean += o[c];
            mean /= static_cast<double>(members);
            CHECK(std::abs(eq[c] - mean) <= 1e-12);
        }

        // scaling all weights by a positive integer changes nothing
        std::vector<Fixed> scaled = weights;
        for (auto& w : scaled) w *= 13;
        const ProbabilityVector out_scaled = weighted_aggregate(outputs, scaled);
        for (std::size_t c = 0; c < classes; ++c)
            CHECK(std::abs(out[c] - out_scaled[c]) <= 1e-12);

        // a dominant member decides the argmax
        std::vector<Fixed> dominant(members, 0);
        const std::size_t boss = rng.next_below(members);
        dominant[boss] = 10000;
        const ProbabilityVector dom = weighted_aggregate(outputs, dominant);
        CHECK(argmax_class(dom) == argmax_class(outputs[boss]));
    }
}

TEST_CASE("accuracy worked examples") {
    CHECK(accuracy(one_hot_batch({0, 1, 1, 0}, {0, 1, 1, 0}, 2)) == 1.0);
    CHECK(accuracy(one_hot_batch({1, 0, 0, 1}, {0, 1, 1, 0}, 2)) == 0.0);
    CHECK(accuracy(one_hot_batch({0, 1, 1, 0}, {0, 1, 1, 1}, 2)) == 0.75);
    CHECK_THROWS_AS(accuracy(PredictionBatch{}), std::invalid_argument);
}

TEST_CASE("argmax ties break to the lowest class index") {
    const PredictionBatch batch{{{0.5, 0.5}}, {0}};
    CHECK(argmax_class(batch.probabilities[0]) == 0);
    CHECK(accuracy(batch) == 1.0);
}

TEST_CASE("macro-F1 worked examples") {
    CHECK(macro_f1(one_hot_batch({0, 1, 0, 1}, {0, 1, 0, 1}, 2)) == 1.0);

    // Always predicting class 0 on a balanced batch: F1(0) = 2/3, F1(1) = 0.
    const PredictionBatch constant = one_hot_batch({0, 0, 0, 0}, {0, 0, 1, 1}, 2);
    CHECK(macro_f1(constant) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // Single-class batch predicted perfectly: absent class divides the mean.
    const PredictionBatch single = one_hot_batch({0, 0, 0}, {0, 0, 0}, 2);
    CHECK(macro_f1(single) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(macro_f1(single) == doctest::Approx(macro_f1_oracle(single)).epsilon(1e-15));
}

TEST_CASE("macro-F1 matches the confusion-matrix oracle") {
    RngStream rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t classes = 2 + rng.next_below(6);
        const std::size_t n = 1 + rng.next_below(60);
        const PredictionBatch batch = random_batch(rng, n, classes);
        CHECK(std::abs(macro_f1(batch) - macro_f1_oracle(batch)) <= 1e-12);
    }
}

TEST_CASE("ECE worked examples") {
    // perfectly calibrated, perfectly confident
    CHECK(expected_calibration_error(one_hot_batch({0, 1}, {0, 1}, 2)) == 0.0);

    // confidence 1.0 everywhere but only half correct
    PredictionBatch half = one_hot_batch({0, 0}, {0, 1}, 2);
    CHECK(expected_calibration_error(half) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(expected_calibration_error(PredictionBatch{}), std::invalid_argument);
    CHECK_THROWS_AS(expected_calibration_error(one_hot_batch({0}, {0}, 2), {0}),
                    std::invalid_argument);
}

TEST_CASE("ECE bin edges go to the lower bin") {
    // Confidence exactly 0.5 with 2 bins must land in bin 0.
    PredictionBatch batch{{{0.5, 0.5}}, {1}};
    // bin 0: conf 0.5, acc 0 -> ECE 0.5
    CHECK(expected_calibration_error(batch, {2}) == doctest::Approx(0.5).epsilon(1e-15));
    // One bin: same result regardless of edges.
    CHECK(expected_calibration_error(batch, {1}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ECE matches the re-binning oracle on random batches") {
    RngStream rng(29);
    const std::vector<std::size_t> bin_counts{1, 2, 5, 10, 15, 20};
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t classes = 2 + rng.next_below(5);
        const std::size_t n = 1 + rng.next_below(50);
        const PredictionBatch batch = random_batch(rng, n, classes);
        const std::size_t bins = bin_counts[trial % bin_counts.size()];
        CHECK(std::abs(expected_calibration_error(batch, {bins}) - ece_oracle(batch, bins)) <=
              1e-12);
    }
}

TEST_CASE("mean confidence") {
    CHECK(mean_confidence(one_hot_batch({0, 1}, {0, 1}, 2)) == 1.0);
    const PredictionBatch uniform{{{0.5, 0.5}, {0.5, 0.5}}, {0, 1}};
    CHECK(mean_confidence(uniform) == 0.5);

    RngStream rng(31);
    const PredictionBatch batch = random_batch(rng, 100, 4);
    double expected = 0.0;
    for (const auto& v : batch.probabilities) expected += v[argmax_class(v)];
    expected /= 100.0;
    CHECK(mean_confidence(batch) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("fixed-point conversion rounds half-up and clamps") {
    CHECK(to_fixed_point(0.0, 10000) == 0);
    CHECK(to_fixed_point(1.0, 10000) == 10000);
    CHECK(to_fixed_point(0.10392, 10000) == 1039);
    CHECK(to_fixed_point(0.00005, 10000) == 1);  // exact .5 rounds up
    CHECK_THROWS_AS(to_fixed_point(-0.1, 10000), std::invalid_argument);
    CHECK_THROWS_AS(to_fixed_point(1.1, 10000), std::invalid_argument);
}

TEST_CASE("metric ranges on random batches") {
    RngStream rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        const PredictionBatch batch = random_batch(rng, 1 + rng.next_below(40), 3);
        const double acc = accuracy(batch);
        const double f1 = macro_f1(batch);
        const double ece = expected_calibration_error(batch);
        CHECK((acc >= 0.0 && acc <= 1.0));
        CHECK((f1 >= 0.0 && f1 <= 1.0));
        CHECK((ece >= 0.0 && ece <= 1.0));
    }
}
