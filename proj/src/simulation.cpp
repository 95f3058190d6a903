#include "chainlearn/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "chainlearn/cost_model.hpp"

namespace chainlearn {

namespace {

double get_number(const nlohmann::json& j, const char* field, double fallback,
                  bool required = false) {
    if (!j.contains(field)) {
        if (required)
            throw std::invalid_argument(std::string("config: missing field '") + field + "'");
        return fallback;
    }
    if (!j[field].is_number())
        throw std::invalid_argument(std::string("config: field '") + field +
                                    "' must be a number");
    return j[field].get<double>();
}

std::uint64_t get_uint(const nlohmann::json& j, const char* field, std::uint64_t fallback,
                       bool required = false) {
    if (!j.contains(field)) {
        if (required)
            throw std::invalid_argument(std::string("config: missing field '") + field + "'");
        return fallback;
    }
    if (j[field].is_number_unsigned()) return j[field].get<std::uint64_t>();
    if (j[field].is_number_integer() && j[field].get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(j[field].get<std::int64_t>());
    throw std::invalid_argument(std::string("config: field '") + field +
                                "' must be a non-negative integer");
}

bool get_bool(const nlohmann::json& j, const char* field, bool fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_boolean())
        throw std::invalid_argument(std::string("config: field '") + field +
                                    "' must be a boolean");
    return j[field].get<bool>();
}

std::string get_string(const nlohmann::json& j, const char* field, const char* fallback,
                       bool required = false) {
    if (!j.contains(field)) {
        if (required)
            throw std::invalid_argument(std::string("config: missing field '") + field + "'");
        return fallback;
    }
    if (!j[field].is_string())
        throw std::invalid_argument(std::string("config: field '") + field +
                                    "' must be a string");
    return j[field].get<std::string>();
}

std::size_t draw_label(const std::vector<double>& distribution, RngStream& rng) {
    const double u = rng.next_unit();
    double cum = 0.0;
    for (std::size_t c = 0; c < distribution.size(); ++c) {
        cum += distribution[c];
        if (u < cum) return c;
    }
    return distribution.size() - 1;
}

std::vector<std::size_t> draw_labels(const std::vector<double>& distribution, std::size_t n,
                                     RngStream& rng) {
    std::vector<std::size_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw_label(distribution, rng));
    return out;
}

SigningKey derive_key(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        ByteWriter w;
        w.put_u64_be(seed);
        w.put_string(tag);
        w.put_u64_be(index);
        w.put_u64_be(attempt);
        const Hash256 candidate = sha256(w.bytes());
        if (secp256k1::is_valid_secret_key(candidate))
            return SigningKey::from_bytes(candidate);
    }
}

Hash256 derive_model_hash(std::uint64_t seed, std::uint64_t hospital_index,
                          std::uint64_t round) {
    ByteWriter w;
    w.put_u64_be(seed);
    w.put_string("model");
    w.put_u64_be(hospital_index);
    w.put_u64_be(round);
    return sha256(w.bytes());
}

// Canonical bytes of an aggregated probability matrix: row-major, each
// entry as a little-endian IEEE binary64.
Hash256 hash_probability_matrix(const std::vector<ProbabilityVector>& rows) {
    ByteWriter w;
    for (const auto& row : rows)
        for (const double p : row) w.put_f64_le(p);
    return sha256(w.bytes());
}

nlohmann::json predictor_to_json(const SyntheticPredictor& p) {
    return {
        {"base_accuracy", p.base_accuracy},
        {"sharpness", p.sharpness},
        {"overconfidence", p.overconfidence},
    };
}

SyntheticPredictor predictor_from_json(const nlohmann::json& j) {
    SyntheticPredictor p;
    p.base_accuracy = get_number(j, "base_accuracy", p.base_accuracy);
    p.sharpness = get_number(j, "sharpness", p.sharpness);
    p.overconfidence = get_number(j, "overconfidence", p.overconfidence);
    return p;
}

}  // namespace

std::string_view to_string(WeightScheme s) {
    switch (s) {
        case WeightScheme::Full: return "full";
        case WeightScheme::NoCapMul: return "no_capmul";
        case WeightScheme::NoConf: return "no_conf";
        case WeightScheme::NoEce: return "no_ece";
        case WeightScheme::NoBonus: return "no_bonus";
        case WeightScheme::EqualWeight: return "equal_weight";
    }
    return "invalid";
}

WeightScheme weight_scheme_from_string(std::string_view s) {
    if (s == "full") return WeightScheme::Full;
    if (s == "no_capmul") return WeightScheme::NoCapMul;
    if (s == "no_conf") return WeightScheme::NoConf;
    if (s == "no_ece") return WeightScheme::NoEce;
    if (s == "no_bonus") return WeightScheme::NoBonus;
    if (s == "equal_weight") return WeightScheme::EqualWeight;
    throw std::invalid_argument("config: unknown weight_scheme '" + std::string(s) + "'");
}

double AttendancePattern::for_tier(CapacityClass c) const {
    switch (c) {
        case CapacityClass::Weak: return weak;
        case CapacityClass::Medium: return medium;
        case CapacityClass::Strong: return strong;
    }
    return 1.0;
}

void ScenarioConfig::validate() const {
    if (hospitals.empty())
        throw std::invalid_argument("config: 'hospitals' must contain at least one entry");
    if (rounds < 1)
        throw std::invalid_argument("config: 'rounds' must be >= 1");
    if (!(dirichlet_alpha > 0.0))
        throw std::invalid_argument("config: 'dirichlet_alpha' must be > 0");
    if (train_pool_size < 1)
        throw std::invalid_argument("config: 'train_pool_size' must be >= 1");
    for (const double p : {attendance.weak, attendance.medium, attendance.strong})
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("config: 'attendance' probabilities must lie in [0, 1]");
    if (task.class_count < 1)
        throw std::invalid_argument("config: 'task.class_count' must be >= 1");
    if (task.val_size < task.class_count || task.test_size < task.class_count)
        throw std::invalid_argument(
            "config: 'task.val_size' and 'task.test_size' must be >= class_count");
    if (!task.label_distribution.empty()) {
        if (task.label_distribution.size() != task.class_count)
            throw std::invalid_argument(
                "config: 'task.label_distribution' length must equal class_count");
        double sum = 0.0;
        for (const double p : task.label_distribution) {
            if (!(p >= 0.0))
                throw std::invalid_argument(
                    "config: 'task.label_distribution' entries must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("config: 'task.label_distribution' must sum to 1");
    }
    if (ece.bin_count < 1)
        throw std::invalid_argument("config: 'ece_bins' must be >= 1");

    std::set<std::string> names;
    for (const HospitalSpec& h : hospitals) {
        if (h.name.empty())
            throw std::invalid_argument("config: hospital 'name' must be non-empty");
        if (!names.insert(h.name).second)
            throw std::invalid_argument("config: duplicate hospital name '" + h.name + "'");
        if (!(h.injected_throughput >= 0.0))
            throw std::invalid_argument("config: hospital 'injected_throughput' must be >= 0");
        if (!(h.predictor.base_accuracy >= 0.0 && h.predictor.base_accuracy <= 1.0))
            throw std::invalid_argument("config: predictor 'base_accuracy' must lie in [0, 1]");
        if (!(h.predictor.sharpness > 0.0))
            throw std::invalid_argument("config: predictor 'sharpness' must be > 0");
        if (!(h.predictor.overconfidence > 0.0))
            throw std::invalid_argument("config: predictor 'overconfidence' must be > 0");
    }
    policy.validate();
}

ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("config: top level must be a JSON object");
    ScenarioConfig cfg;
    cfg.seed = get_uint(j, "seed", cfg.seed);
    cfg.rounds = get_uint(j, "rounds", cfg.rounds);
    cfg.dirichlet_alpha = get_number(j, "dirichlet_alpha", cfg.dirichlet_alpha);
    cfg.train_pool_size = get_uint(j, "train_pool_size", cfg.train_pool_size);
    cfg.weight_scheme = weight_scheme_from_string(
        get_string(j, "weight_scheme", std::string(to_string(cfg.weight_scheme)).c_str()));
    cfg.poc_enabled = get_bool(j, "poc_enabled", cfg.poc_enabled);
    cfg.ece.bin_count = get_uint(j, "ece_bins", cfg.ece.bin_count);

    if (j.contains("attendance")) {
        const nlohmann::json& a = j["attendance"];
        if (!a.is_object())
            throw std::invalid_argument("config: field 'attendance' must be an object");
        cfg.attendance.weak = get_number(a, "weak", 1.0);
        cfg.attendance.medium = get_number(a, "medium", 1.0);
        cfg.attendance.strong = get_number(a, "strong", 1.0);
    }

    if (j.contains("task")) {
        const nlohmann::json& t = j["task"];
        if (!t.is_object())
            throw std::invalid_argument("config: field 'task' must be an object");
        cfg.task.class_count = get_uint(t, "class_count", cfg.task.class_count);
        cfg.task.val_size = get_uint(t, "val_size", cfg.task.val_size);
        cfg.task.test_size = get_uint(t, "test_size", cfg.task.test_size);
        if (t.contains("label_distribution")) {
            if (!t["label_distribution"].is_array())
                throw std::invalid_argument(
                    "config: field 'task.label_distribution' must be an array");
            cfg.task.label_distribution =
                t["label_distribution"].get<std::vector<double>>();
        }
    }

    if (j.contains("policy")) {
        const nlohmann::json& p = j["policy"];
        if (!p.is_object())
            throw std::invalid_argument("config: field 'policy' must be an object");
        cfg.policy.scale = static_cast<std::int64_t>(get_uint(p, "scale", 10'000));
        cfg.policy.max_weight = static_cast<std::int64_t>(get_uint(p, "max_weight", 15'000));
        cfg.policy.mult_weak = static_cast<std::int64_t>(get_uint(p, "mult_weak", 8'000));
        cfg.policy.mult_medium =
            static_cast<std::int64_t>(get_uint(p, "mult_medium", 10'000));
        cfg.policy.mult_strong =
            static_cast<std::int64_t>(get_uint(p, "mult_strong", 12'000));
        cfg.policy.bonus_per_round =
            static_cast<std::int64_t>(get_uint(p, "bonus_per_round", 500));
        cfg.policy.bonus_cap = static_cast<std::int64_t>(get_uint(p, "bonus_cap", 2'500));
    }

    if (!j.contains("hospitals") || !j["hospitals"].is_array())
        throw std::invalid_argument("config: field 'hospitals' must be a non-empty array");
    for (const nlohmann::json& h : j["hospitals"]) {
        if (!h.is_object())
            throw std::invalid_argument("config: 'hospitals' entries must be objects");
        HospitalSpec spec;
        spec.name = get_string(h, "name", "", true);
        spec.declared_capacity =
            capacity_from_string(get_string(h, "declared_capacity", "", true));
        spec.injected_throughput = get_number(h, "injected_throughput", 0.0, true);
        if (h.contains("predictor")) spec.predictor = predictor_from_json(h["predictor"]);
        cfg.hospitals.push_back(std::move(spec));
    }

    cfg.validate();
    return cfg;
}

nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json hospitals = nlohmann::json::array();
    for (const HospitalSpec& h : cfg.hospitals) {
        hospitals.push_back({
            {"name", h.name},
            {"declared_capacity", std::string(to_string(h.declared_capacity))},
            {"injected_throughput", h.injected_throughput},
            {"predictor", predictor_to_json(h.predictor)},
        });
    }
    nlohmann::json task = {
        {"class_count", cfg.task.class_count},
        {"val_size", cfg.task.val_size},
        {"test_size", cfg.task.test_size},
    };
    if (!cfg.task.label_distribution.empty())
        task["label_distribution"] = cfg.task.label_distribution;
    return {
        {"seed", cfg.seed},
        {"rounds", cfg.rounds},
        {"dirichlet_alpha", cfg.dirichlet_alpha},
        {"train_pool_size", cfg.train_pool_size},
        {"weight_scheme", std::string(to_string(cfg.weight_scheme))},
        {"poc_enabled", cfg.poc_enabled},
        {"attendance",
         {{"weak", cfg.attendance.weak},
          {"medium", cfg.attendance.medium},
          {"strong", cfg.attendance.strong}}},
        {"task", std::move(task)},
        {"ece_bins", cfg.ece.bin_count},
        {"policy",
         {{"scale", cfg.policy.scale},
          {"max_weight", cfg.policy.max_weight},
          {"mult_weak", cfg.policy.mult_weak},
          {"mult_medium", cfg.policy.mult_medium},
          {"mult_strong", cfg.policy.mult_strong},
          {"bonus_per_round", cfg.policy.bonus_per_round},
          {"bonus_cap", cfg.policy.bonus_cap}}},
        {"hospitals", std::move(hospitals)},
    };
}

std::vector<std::vector<std::size_t>> dirichlet_partition(const std::vector<std::size_t>& labels,
                                                          std::size_t n_parts, double alpha,
                                                          RngStream& rng) {
    if (labels.empty())
        throw std::invalid_argument("dirichlet_partition: empty label list");
    if (n_parts < 1)
        throw std::invalid_argument("dirichlet_partition: n_parts must be >= 1");
    if (!(alpha > 0.0))
        throw std::invalid_argument("dirichlet_partition: alpha must be > 0");

    // Class ids in ascending order so the draw sequence is reproducible.
    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    std::vector<std::vector<std::size_t>> parts(n_parts);
    for (const auto& [cls, indices] : by_class) {
        std::vector<double> proportions(n_parts);
        double sum = 0.0;
        for (std::size_t p = 0; p < n_parts; ++p) {
            proportions[p] = rng.next_gamma(alpha);
            sum += proportions[p];
        }
        if (sum <= 0.0) {
            std::fill(proportions.begin(), proportions.end(),
                      1.0 / static_cast<double>(n_parts));
            sum = 1.0;
        }

        // Largest-remainder rounding of the per-part quotas.
        const std::size_t m = indices.size();
        std::vector<std::size_t> counts(n_parts);
        std::vector<std::pair<double, std::size_t>> remainders(n_parts);
        std::size_t assigned = 0;
        for (std::size_t p = 0; p < n_parts; ++p) {
            const double quota = proportions[p] / sum * static_cast<double>(m);
            counts[p] = static_cast<std::size_t>(std::floor(quota));
            remainders[p] = {quota - std::floor(quota), p};
            assigned += counts[p];
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;  // ties to the lower part index
        });
        for (std::size_t k = 0; assigned < m; ++k, ++assigned) counts[remainders[k].second] += 1;

        std::size_t cursor = 0;
        for (std::size_t p = 0; p < n_parts; ++p) {
            for (std::size_t k = 0; k < counts[p]; ++k)
                parts[p].push_back(indices[cursor++]);
        }
    }
    return parts;
}

PredictionBatch generate_predictions(const SyntheticPredictor& predictor,
                                     const std::vector<std::size_t>& labels,
                                     std::size_t class_count, RngStream& rng) {
    if (class_count < 1)
        throw std::invalid_argument("generate_predictions: class_count must be >= 1");
    if (!(predictor.base_accuracy >= 0.0 && predictor.base_accuracy <= 1.0))
        throw std::invalid_argument("generate_predictions: base_accuracy outside [0, 1]");
    if (!(predictor.sharpness > 0.0))
        throw std::invalid_argument("generate_predictions: sharpness must be > 0");
    if (!(predictor.overconfidence > 0.0))
        throw std::invalid_argument("generate_predictions: overconfidence must be > 0");

    const double lambda = std::isinf(predictor.sharpness)
                              ? 1.0
                              : predictor.sharpness / (1.0 + predictor.sharpness);

    PredictionBatch batch;
    batch.probabilities.reserve(labels.size());
    batch.labels = labels;

    for (const std::size_t truth : labels) {
        if (truth >= class_count)
            throw std::invalid_argument("generate_predictions: label out of range");

        const bool correct = rng.next_bernoulli(predictor.base_accuracy);
        std::size_t argmax = truth;
        if (!correct && class_count > 1) {
            const std::size_t wrong = rng.next_below(class_count - 1);
            argmax = wrong >= truth ? wrong + 1 : wrong;
        }

        // Dirichlet(1) base vector with its peak moved onto the argmax.
        ProbabilityVector w(class_count);
        double sum = 0.0;
        for (std::size_t c = 0; c < class_count; ++c) {
            w[c] = rng.next_exponential();
            sum += w[c];
        }
        if (sum <= 0.0) {
            std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(class_count));
        } else {
            for (double& v : w) v /= sum;
        }
        std::swap(w[argmax_class(w)], w[argmax]);

        ProbabilityVector p(class_count);
        for (std::size_t c = 0; c < class_count; ++c)
            p[c] = (1.0 - lambda) * w[c] + (c == argmax ? lambda : 0.0);

        if (predictor.overconfidence != 1.0) {
            double norm = 0.0;
            for (double& v : p) {
                v = std::pow(v, predictor.overconfidence);
                norm += v;
            }
            for (double& v : p) v /= norm;
        }
        batch.probabilities.push_back(std::move(p));
    }
    return batch;
}

namespace {

struct HospitalRuntime {
    std::size_t index = 0;
    HospitalSpec spec;
    SigningKey key;
    Address addr{};
    bool registered = false;
};

Fixed scheme_weight(WeightScheme scheme, const Coordinator& coordinator,
                    const HospitalRecord& record) {
    switch (scheme) {
        case WeightScheme::Full:
            return coordinator.calculate_weight_view(record.addr);
        case WeightScheme::EqualWeight:
            return 1;
        case WeightScheme::NoCapMul:
        case WeightScheme::NoConf:
        case WeightScheme::NoEce:
        case WeightScheme::NoBonus: {
            AblationVariant variant = AblationVariant::Full;
            if (scheme == WeightScheme::NoCapMul) variant = AblationVariant::NoCapMul;
            if (scheme == WeightScheme::NoConf) variant = AblationVariant::NoConf;
            if (scheme == WeightScheme::NoEce) variant = AblationVariant::NoEce;
            if (scheme == WeightScheme::NoBonus) variant = AblationVariant::NoBonus;
            return ablated_weight(variant, record.capacity,
                                  {record.confidence, record.ece, record.rounds_participated},
                                  coordinator.policy());
        }
    }
    throw std::invalid_argument("scheme_weight: invalid weight scheme");
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    const std::size_t class_count = cfg.task.class_count;
    std::vector<double> label_distribution = cfg.task.label_distribution;
    if (label_distribution.empty())
        label_distribution.assign(class_count, 1.0 / static_cast<double>(class_count));

    ScenarioReport report;
    report.seed = cfg.seed;
    report.config = scenario_config_to_json(cfg);

    // Fixed evaluation streams: reliability metrics always come from the
    // validation labels, ensemble quality always from the test labels.
    RngStream task_stream(derive_stream_seed(cfg.seed, "task"));
    const std::vector<std::size_t> val_labels =
        draw_labels(label_distribution, cfg.task.val_size, task_stream);
    const std::vector<std::size_t> test_labels =
        draw_labels(label_distribution, cfg.task.test_size, task_stream);

    // Training shards exist as label histograms only; parameters stay opaque.
    RngStream partition_stream(derive_stream_seed(cfg.seed, "partition"));
    const std::vector<std::size_t> pool_labels =
        draw_labels(label_distribution, cfg.train_pool_size, partition_stream);
    const auto shards = dirichlet_partition(pool_labels, cfg.hospitals.size(),
                                            cfg.dirichlet_alpha, partition_stream);
    for (const auto& shard : shards) {
        std::vector<std::uint64_t> histogram(class_count, 0);
        for (const std::size_t idx : shard) histogram[pool_labels[idx]] += 1;
        report.shard_label_counts.push_back(std::move(histogram));
    }

    const SigningKey owner_key = derive_key(cfg.seed, "owner-key", 0);
    Coordinator coordinator(owner_key.address(),
                            {cfg.poc_enabled, 1, cfg.policy});

    std::vector<HospitalRuntime> runtime;
    runtime.reserve(cfg.hospitals.size());
    for (std::size_t i = 0; i < cfg.hospitals.size(); ++i) {
        HospitalRuntime h{i, cfg.hospitals[i], derive_key(cfg.seed, "hospital-key", i)};
        h.addr = h.key.address();

        BenchmarkWorkload workload;
        workload.mode = BenchmarkWorkload::Mode::Injected;
        workload.injected_throughput = h.spec.injected_throughput;
        BenchmarkReport bench = run_benchmark(workload, 50, 32);
        bench.declared_capacity = h.spec.declared_capacity;  // the claim, honest or not
        const SignedBenchmark signed_benchmark = make_signed_benchmark(bench, h.key);

        RegistrationOutcome outcome;
        outcome.name = h.spec.name;
        outcome.address = to_hex(h.addr);
        outcome.declared = h.spec.declared_capacity;
        outcome.architecture =
            std::string(to_string(assign_architecture(h.spec.declared_capacity).family));
        try {
            coordinator.register_hospital(h.addr, h.spec.name, h.spec.declared_capacity,
                                          signed_benchmark);
            outcome.accepted = true;
            h.registered = true;
        } catch (const ProtocolError& e) {
            outcome.accepted = false;
            outcome.rejection = std::string(to_string(e.reason()));
            report.events.push_back(
                {0, h.spec.name, "registration_rejected", outcome.rejection});
        }
        report.registrations.push_back(std::move(outcome));
        runtime.push_back(std::move(h));
    }

    std::vector<std::uint64_t> attended(cfg.hospitals.size(), 0);

    for (std::uint64_t round = 1; round <= cfg.rounds; ++round) {
        coordinator.start_new_round(owner_key.address());

        RoundReport round_report;
        round_report.round = round;

        struct Accepted {
            std::size_t index;
            PredictionBatch test;
        };
        std::vector<Accepted> accepted;
        struct PendingRow {
            std::size_t index;
            MemberRoundMetrics row;
        };
        std::vector<PendingRow> rows;

        for (HospitalRuntime& h : runtime) {
            if (!h.registered) continue;
            RngStream attendance_stream(
                derive_stream_seed(cfg.seed, "attendance", h.index, round));
            const double p =
                cfg.attendance.for_tier(coordinator.hospital(h.addr).capacity);
            if (!attendance_stream.next_bernoulli(p)) continue;

            attended[h.index] += 1;
            round_report.attending.push_back(h.spec.name);

            RngStream prediction_stream(
                derive_stream_seed(cfg.seed, "hospital", h.index, round));
            const PredictionBatch val =
                generate_predictions(h.spec.predictor, val_labels, class_count,
                                     prediction_stream);
            PredictionBatch test =
                generate_predictions(h.spec.predictor, test_labels, class_count,
                                     prediction_stream);

            RoundSubmission submission;
            submission.model_hash = derive_model_hash(cfg.seed, h.index, round);
            submission.confidence = to_fixed_point(mean_confidence(val), cfg.policy.scale);
            submission.ece =
                to_fixed_point(expected_calibration_error(val, cfg.ece), cfg.policy.scale);
            submission.model_type =
                assign_architecture(coordinator.hospital(h.addr).capacity).family;

            MemberRoundMetrics row;
            row.member = h.spec.name;
            row.accuracy = accuracy(test);
            row.macro_f1 = macro_f1(test);
            row.ece = expected_calibration_error(test, cfg.ece);

            try {
                coordinator.submit_update(h.addr, submission);
                row.accepted = true;
                accepted.push_back({h.index, std::move(test)});
            } catch (const ProtocolError& e) {
                row.accepted = false;
                report.events.push_back({round, h.spec.name, "submission_rejected",
                                         std::string(to_string(e.reason()))});
            }
            rows.push_back({h.index, std::move(row)});
        }

        // Weights reflect the state after this round's accepted submissions.
        std::vector<Fixed> weights;
        weights.reserve(accepted.size());
        for (const Accepted& a : accepted) {
            const HospitalRecord& record = coordinator.hospital(runtime[a.index].addr);
            const Fixed w = scheme_weight(cfg.weight_scheme, coordinator, record);
            weights.push_back(w);
            for (PendingRow& pending : rows)
                if (pending.index == a.index) pending.row.weight = w;
        }

        round_report.accepted_count = accepted.size();

        if (!accepted.empty()) {
            std::vector<ProbabilityVector> aggregate_rows;
            aggregate_rows.reserve(test_labels.size());
            std::vector<ProbabilityVector> member_outputs(accepted.size());
            for (std::size_t t = 0; t < test_labels.size(); ++t) {
                for (std::size_t m = 0; m < accepted.size(); ++m)
                    member_outputs[m] = accepted[m].test.probabilities[t];
                aggregate_rows.push_back(weighted_aggregate(member_outputs, weights));
            }

            const Hash256 prediction_hash = hash_probability_matrix(aggregate_rows);
            coordinator.record_ensemble_prediction(owner_key.address(), round,
                                                   prediction_hash);
            const EnsembleRecord* record = coordinator.find_ensemble(round);
            round_report.recorded = true;
            round_report.prediction_hash = to_hex(prediction_hash);
            round_report.participant_count = record->participant_count;

            PredictionBatch ensemble_batch;
            ensemble_batch.probabilities = std::move(aggregate_rows);
            ensemble_batch.labels = test_labels;

            MemberRoundMetrics ensemble_row;
            ensemble_row.member = "ensemble";
            ensemble_row.accuracy = accuracy(ensemble_batch);
            ensemble_row.macro_f1 = macro_f1(ensemble_batch);
            ensemble_row.ece = expected_calibration_error(ensemble_batch, cfg.ece);
            Fixed total = 0;
            for (const Fixed w : weights) total += w;
            ensemble_row.weight = total;
            ensemble_row.accepted = true;

            for (PendingRow& pending : rows)
                round_report.members.push_back(std::move(pending.row));
            round_report.members.push_back(std::move(ensemble_row));
        } else {
            for (PendingRow& pending : rows)
                round_report.members.push_back(std::move(pending.row));
        }

        report.rounds.push_back(std::move(round_report));
    }

    for (const HospitalRuntime& h : runtime) {
        HospitalSummary summary;
        summary.name = h.spec.name;
        summary.address = to_hex(h.addr);
        summary.registered = h.registered;
        summary.attended = attended[h.index];
        if (h.registered) {
            const HospitalRecord& record = coordinator.hospital(h.addr);
            summary.rounds_participated = record.rounds_participated;
            summary.final_weight = coordinator.calculate_weight_view(h.addr);
            summary.bonus = participation_bonus(record.rounds_participated, cfg.policy);
        }
        report.hospitals.push_back(std::move(summary));
    }

    return {std::move(report), coordinator.audit_log()};
}

nlohmann::json ScenarioReport::to_json() const {
    nlohmann::json registrations_json = nlohmann::json::array();
    for (const RegistrationOutcome& r : registrations) {
        registrations_json.push_back({
            {"name", r.name},
            {"address", r.address},
            {"declared_capacity", std::string(to_string(r.declared))},
            {"architecture", r.architecture},
            {"accepted", r.accepted},
            {"rejection", r.rejection},
        });
    }

    nlohmann::json rounds_json = nlohmann::json::array();
    for (const RoundReport& r : rounds) {
        nlohmann::json members = nlohmann::json::array();
        for (const MemberRoundMetrics& m : r.members) {
            members.push_back({
                {"member", m.member},
                {"accuracy", m.accuracy},
                {"macro_f1", m.macro_f1},
                {"ece", m.ece},
                {"weight", m.weight},
                {"accepted", m.accepted},
            });
        }
        rounds_json.push_back({
            {"round", r.round},
            {"attending", r.attending},
            {"accepted_count", r.accepted_count},
            {"members", std::move(members)},
            {"recorded", r.recorded},
            {"prediction_hash", r.prediction_hash},
            {"participant_count", r.participant_count},
        });
    }

    nlohmann::json hospitals_json = nlohmann::json::array();
    for (const HospitalSummary& h : hospitals) {
        hospitals_json.push_back({
            {"name", h.name},
            {"address", h.address},
            {"registered", h.registered},
            {"attended", h.attended},
            {"rounds_participated", h.rounds_participated},
            {"final_weight", h.final_weight},
            {"bonus", h.bonus},
        });
    }

    nlohmann::json events_json = nlohmann::json::array();
    for (const ScenarioEvent& e : events) {
        events_json.push_back({
            {"round", e.round},
            {"member", e.member},
            {"kind", e.kind},
            {"detail", e.detail},
        });
    }

    return {
        {"seed", seed},
        {"config", config},
        {"registrations", std::move(registrations_json)},
        {"shard_label_counts", shard_label_counts},
        {"rounds", std::move(rounds_json)},
        {"hospitals", std::move(hospitals_json)},
        {"events", std::move(events_json)},
    };
}

std::string ScenarioReport::metrics_csv() const {
    std::ostringstream out;
    out << "round,hospital_or_ensemble,accuracy,macro_f1,ece,weight,accepted\n";
    const auto num = [](double v) { return nlohmann::json(v).dump(); };
    for (const RoundReport& r : rounds) {
        for (const MemberRoundMetrics& m : r.members) {
            out << r.round << ',' << m.member << ',' << num(m.accuracy) << ','
                << num(m.macro_f1) << ',' << num(m.ece) << ',' << m.weight << ','
                << (m.accepted ? "true" : "false") << '\n';
        }
    }
    return out.str();
}

namespace {

SpoofArmSummary summarize_arm(const std::string& arm, const ScenarioReport& report,
                              const std::string& attacker_name) {
    SpoofArmSummary summary;
    summary.arm = arm;
    summary.attacker_status = "absent";

    for (const RegistrationOutcome& r : report.registrations) {
        if (r.name == attacker_name)
            summary.attacker_status = r.accepted ? "accepted" : r.rejection;
    }

    double accuracy_sum = 0.0;
    double ece_sum = 0.0;
    std::size_t recorded = 0;
    for (const RoundReport& r : report.rounds) {
        if (!r.recorded) continue;
        ++recorded;
        summary.participant_count = r.participant_count;
        for (const MemberRoundMetrics& m : r.members) {
            if (m.member == "ensemble") {
                accuracy_sum += m.accuracy;
                ece_sum += m.ece;
            }
            if (m.member == attacker_name && m.accepted) summary.attacker_included = true;
        }
    }
    if (recorded > 0) {
        summary.ensemble_accuracy = accuracy_sum / static_cast<double>(recorded);
        summary.ensemble_ece = ece_sum / static_cast<double>(recorded);
    }
    return summary;
}

}  // namespace

SpoofReport run_spoofing_scenario(const ScenarioConfig& base, const AttackerSpec& attacker) {
    base.validate();
    if (classify_capacity(attacker.actual_throughput) == attacker.declared_capacity)
        throw std::invalid_argument(
            "attacker: actual_throughput must classify below the declared capacity");

    HospitalSpec attacker_spec;
    attacker_spec.name = attacker.name;
    attacker_spec.declared_capacity = attacker.declared_capacity;
    attacker_spec.injected_throughput = attacker.actual_throughput;
    attacker_spec.predictor = attacker.predictor;

    ScenarioConfig spoofed = base;
    if (attacker.replace_slot && !spoofed.hospitals.empty())
        spoofed.hospitals.back() = attacker_spec;
    else
        spoofed.hospitals.push_back(attacker_spec);

    ScenarioConfig no_poc = spoofed;
    no_poc.poc_enabled = false;
    ScenarioConfig with_poc = spoofed;
    with_poc.poc_enabled = true;

    SpoofReport report;
    report.honest_report = run_scenario(base).report;
    report.spoofed_no_poc_report = run_scenario(no_poc).report;
    report.spoofed_poc_report = run_scenario(with_poc).report;
    report.honest = summarize_arm("honest", report.honest_report, attacker.name);
    report.spoofed_no_poc =
        summarize_arm("spoofed_no_poc", report.spoofed_no_poc_report, attacker.name);
    report.spoofed_poc =
        summarize_arm("spoofed_poc", report.spoofed_poc_report, attacker.name);
    return report;
}

nlohmann::json SpoofReport::to_json() const {
    const auto arm_json = [](const SpoofArmSummary& a) {
        return nlohmann::json{
            {"arm", a.arm},
            {"participant_count", a.participant_count},
            {"ensemble_accuracy", a.ensemble_accuracy},
            {"ensemble_ece", a.ensemble_ece},
            {"attacker_included", a.attacker_included},
            {"attacker_status", a.attacker_status},
        };
    };
    return {
        {"summary",
         {arm_json(honest), arm_json(spoofed_no_poc), arm_json(spoofed_poc)}},
        {"honest", honest_report.to_json()},
        {"spoofed_no_poc", spoofed_no_poc_report.to_json()},
        {"spoofed_poc", spoofed_poc_report.to_json()},
    };
}

AttackerSpec attacker_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("config: field 'attacker' must be an object");
    AttackerSpec spec;
    spec.name = get_string(j, "name", spec.name.c_str());
    spec.declared_capacity = capacity_from_string(
        get_string(j, "declared_capacity", std::string(to_string(spec.declared_capacity)).c_str()));
    spec.actual_throughput = get_number(j, "actual_throughput", spec.actual_throughput);
    if (j.contains("predictor")) spec.predictor = predictor_from_json(j["predictor"]);
    if (j.contains("replace_slot")) spec.replace_slot = get_bool(j, "replace_slot", true);
    return spec;
}

}  // namespace chainlearn
