#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainlearn/coordinator.hpp"
#include "chainlearn/ensemble.hpp"
#include "chainlearn/rng.hpp"

namespace chainlearn {

struct SyntheticTask {
    std::size_t class_count = 2;
    std::size_t val_size = 312;   // reliability metrics only
    std::size_t test_size = 312;  // ensemble quality only
    std::vector<double> label_distribution;  // empty means uniform
};

/// Calibration-controlled stand-in for a trained model. The emitted
/// distribution for one input is built as follows (draws in this order, so
/// the stream is identical for every overconfidence setting):
///   1. one uniform decides whether the argmax is the true label
///      (probability base_accuracy) or a uniformly random wrong class;
///   2. a symmetric Dirichlet(1) vector is drawn (class_count exponentials,
///      normalized) and its largest component is swapped into the argmax
///      position;
///   3. the vector is blended with the argmax one-hot using weight
///      sharpness / (1 + sharpness); infinite sharpness yields an exact
///      one-hot;
///   4. every entry is raised to the overconfidence power and renormalized,
///      which inflates the max mass without moving the argmax.
struct SyntheticPredictor {
    double base_accuracy = 0.8;   // in [0, 1]
    double sharpness = 4.0;       // > 0, may be +infinity
    double overconfidence = 1.0;  // gamma > 0; > 1 inflates confidence
};

struct HospitalSpec {
    std::string name;
    CapacityClass declared_capacity = CapacityClass::Medium;
    double injected_throughput = 150.0;
    SyntheticPredictor predictor;
};

/// Weight source for off-chain aggregation. Full reads the contract view;
/// the ablations recompute the policy with one factor neutralized;
/// EqualWeight forces W = 1 for every member.
enum class WeightScheme { Full, NoCapMul, NoConf, NoEce, NoBonus, EqualWeight };

std::string_view to_string(WeightScheme s);
WeightScheme weight_scheme_from_string(std::string_view s);

struct AttendancePattern {
    double weak = 1.0;
    double medium = 1.0;
    double strong = 1.0;

    double for_tier(CapacityClass c) const;
};

struct ScenarioConfig {
    std::vector<HospitalSpec> hospitals;
    std::uint64_t rounds = 5;
    double dirichlet_alpha = 1.0;
    std::size_t train_pool_size = 5000;
    WeightScheme weight_scheme = WeightScheme::Full;
    bool poc_enabled = true;
    AttendancePattern attendance;
    std::uint64_t seed = 42;
    SyntheticTask task;
    EceConfig ece;
    PolicyConstants policy;

    void validate() const;  // throws std::invalid_argument naming the field
};

ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg);

/// Splits `labels` into n_parts index lists: per class, part proportions are
/// drawn from Dirichlet(alpha, ..., alpha) and the class's indices are dealt
/// out by largest-remainder rounding. The parts are disjoint and exhaust the
/// index set. Throws std::invalid_argument on an empty label list.
std::vector<std::vector<std::size_t>> dirichlet_partition(const std::vector<std::size_t>& labels,
                                                          std::size_t n_parts, double alpha,
                                                          RngStream& rng);

/// Samples a batch from the predictor for the given true labels.
PredictionBatch generate_predictions(const SyntheticPredictor& predictor,
                                     const std::vector<std::size_t>& labels,
                                     std::size_t class_count, RngStream& rng);

struct RegistrationOutcome {
    std::string name;
    std::string address;  // hex
    CapacityClass declared = CapacityClass::Weak;
    std::string architecture;
    bool accepted = false;
    std::string rejection;  // RejectReason name when rejected
};

struct MemberRoundMetrics {
    std::string member;  // hospital name or "ensemble"
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double ece = 0.0;
    std::int64_t weight = 0;
    bool accepted = false;
};

struct RoundReport {
    std::uint64_t round = 0;
    std::vector<std::string> attending;
    std::uint64_t accepted_count = 0;
    std::vector<MemberRoundMetrics> members;  // attendees first, then the ensemble row
    bool recorded = false;
    std::string prediction_hash;  // hex, empty when nothing was recorded
    std::uint64_t participant_count = 0;
};

struct HospitalSummary {
    std::string name;
    std::string address;
    bool registered = false;
    std::uint64_t attended = 0;
    std::uint64_t rounds_participated = 0;
    Fixed final_weight = 0;
    Fixed bonus = 0;
};

struct ScenarioEvent {
    std::uint64_t round = 0;  // 0 for registration-phase events
    std::string member;
    std::string kind;    // "registration_rejected", "submission_rejected", ...
    std::string detail;
};

struct ScenarioReport {
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<RegistrationOutcome> registrations;
    std::vector<std::vector<std::uint64_t>> shard_label_counts;  // [hospital][class]
    std::vector<RoundReport> rounds;
    std::vector<HospitalSummary> hospitals;
    std::vector<ScenarioEvent> events;

    nlohmann::json to_json() const;
    /// Flat per-round metrics: round,hospital_or_ensemble,accuracy,macro_f1,
    /// ece,weight,accepted.
    std::string metrics_csv() const;
};

struct ScenarioResult {
    ScenarioReport report;
    std::vector<AuditEvent> audit;
};

/// Full lifecycle, deterministic in (config, seed): registration through the
/// identity pipeline, then per round attendance sampling, prediction
/// generation, metric extraction, on-chain submission, weight queries,
/// off-chain aggregation and ensemble recording. Expected protocol
/// rejections become report events, not failures.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct AttackerSpec {
    std::string name = "attacker";
    CapacityClass declared_capacity = CapacityClass::Strong;
    double actual_throughput = 50.0;  // classifies weak
    SyntheticPredictor predictor{0.55, 4.0, 1.0};
    bool replace_slot = true;  // replace the last honest hospital vs join as an extra
};

struct SpoofArmSummary {
    std::string arm;
    std::uint64_t participant_count = 0;  // final round's ensemble record
    double ensemble_accuracy = 0.0;       // mean over recorded rounds
    double ensemble_ece = 0.0;
    bool attacker_included = false;
    std::string attacker_status;  // "absent", "accepted" or the rejection reason
};

struct SpoofReport {
    SpoofArmSummary honest;
    SpoofArmSummary spoofed_no_poc;
    SpoofArmSummary spoofed_poc;
    ScenarioReport honest_report;
    ScenarioReport spoofed_no_poc_report;
    ScenarioReport spoofed_poc_report;

    nlohmann::json to_json() const;
};

/// Three arms on one seed: the honest federation, the spoofed federation
/// with capacity proofing disabled (attacker admitted) and with it enabled
/// (attacker rejected at registration). Accuracy is reported, not judged.
SpoofReport run_spoofing_scenario(const ScenarioConfig& base, const AttackerSpec& attacker);

AttackerSpec attacker_spec_from_json(const nlohmann::json& j);

}  // namespace chainlearn
