#include "chainlearn/coordinator.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace chainlearn {

namespace {

std::string hex(const Hash256& h) { return to_hex(h); }
std::string hex(const Address& a) { return to_hex(a); }

Hash256 hash_from_json(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw std::invalid_argument(std::string("audit event: missing hex field ") + field);
    return array_from_hex<32>(j[field].get<std::string>());
}

Address address_from_json(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw std::invalid_argument(std::string("audit event: missing hex field ") + field);
    return array_from_hex<20>(j[field].get<std::string>());
}

nlohmann::json policy_json(const PolicyConstants& p) {
    return {
        {"scale", p.scale},
        {"max_weight", p.max_weight},
        {"mult_weak", p.mult_weak},
        {"mult_medium", p.mult_medium},
        {"mult_strong", p.mult_strong},
        {"bonus_per_round", p.bonus_per_round},
        {"bonus_cap", p.bonus_cap},
    };
}

PolicyConstants policy_from_json(const nlohmann::json& j) {
    PolicyConstants p;
    p.scale = j.at("scale").get<std::int64_t>();
    p.max_weight = j.at("max_weight").get<std::int64_t>();
    p.mult_weak = j.at("mult_weak").get<std::int64_t>();
    p.mult_medium = j.at("mult_medium").get<std::int64_t>();
    p.mult_strong = j.at("mult_strong").get<std::int64_t>();
    p.bonus_per_round = j.at("bonus_per_round").get<std::int64_t>();
    p.bonus_cap = j.at("bonus_cap").get<std::int64_t>();
    return p;
}

ArchitectureFamily family_from_string(std::string_view s) {
    if (s == "MobileNetV3Small") return ArchitectureFamily::MobileNetV3Small;
    if (s == "EfficientNetB0") return ArchitectureFamily::EfficientNetB0;
    if (s == "ResNet50") return ArchitectureFamily::ResNet50;
    throw std::invalid_argument("unknown architecture family '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(EventType t) {
    switch (t) {
        case EventType::Genesis: return "genesis";
        case EventType::HospitalRegistered: return "hospital_registered";
        case EventType::RoundStarted: return "round_started";
        case EventType::UpdateSubmitted: return "update_submitted";
        case EventType::EnsembleRecorded: return "ensemble_recorded";
    }
    return "invalid";
}

EventType event_type_from_string(std::string_view s) {
    if (s == "genesis") return EventType::Genesis;
    if (s == "hospital_registered") return EventType::HospitalRegistered;
    if (s == "round_started") return EventType::RoundStarted;
    if (s == "update_submitted") return EventType::UpdateSubmitted;
    if (s == "ensemble_recorded") return EventType::EnsembleRecorded;
    throw std::invalid_argument("unknown event type '" + std::string(s) + "'");
}

Hash256 AuditEvent::chain_digest(const Hash256& prev, std::uint64_t seq, EventType type,
                                 const nlohmann::json& payload) {
    const nlohmann::json canonical = {
        {"event_type", std::string(to_string(type))},
        {"payload", payload},
        {"seq", seq},
    };
    ByteWriter w;
    w.put_bytes(prev);
    w.put_string(canonical.dump());
    return sha256(w.bytes());
}

nlohmann::json AuditEvent::to_json() const {
    return {
        {"seq", seq},
        {"prev_digest", hex(prev_digest)},
        {"digest", hex(digest)},
        {"event_type", std::string(to_string(event_type))},
        {"payload", payload},
    };
}

AuditEvent AuditEvent::from_json(const nlohmann::json& j) {
    AuditEvent e;
    if (!j.contains("seq") || !j["seq"].is_number_unsigned())
        throw std::invalid_argument("audit event: missing or invalid seq");
    e.seq = j["seq"].get<std::uint64_t>();
    e.prev_digest = hash_from_json(j, "prev_digest");
    e.digest = hash_from_json(j, "digest");
    if (!j.contains("event_type") || !j["event_type"].is_string())
        throw std::invalid_argument("audit event: missing event_type");
    e.event_type = event_type_from_string(j["event_type"].get<std::string>());
    if (!j.contains("payload") || !j["payload"].is_object())
        throw std::invalid_argument("audit event: missing payload");
    e.payload = j["payload"];
    return e;
}

Coordinator::Coordinator(const Address& owner) : Coordinator(owner, Options{}) {}

Coordinator::Coordinator(const Address& owner, Options options)
    : owner_(owner), options_(options), clock_next_(options.clock_start) {
    options_.policy.validate();
    append_event(EventType::Genesis,
                 {
                     {"owner", hex(owner_)},
                     {"poc_enabled", options_.poc_enabled},
                     {"policy", policy_json(options_.policy)},
                     {"clock_start", options_.clock_start},
                 });
}

Coordinator::Coordinator(ReplayTag, const Address& owner, Options options)
    : owner_(owner), options_(options), clock_next_(options.clock_start) {
    options_.policy.validate();
}

std::int64_t Coordinator::tick() { return clock_next_++; }

void Coordinator::append_event(EventType type, nlohmann::json payload) {
    AuditEvent e;
    e.seq = audit_log_.size();
    e.prev_digest = audit_log_.empty() ? Hash256{} : audit_log_.back().digest;
    e.event_type = type;
    e.payload = std::move(payload);
    e.digest = AuditEvent::chain_digest(e.prev_digest, e.seq, e.event_type, e.payload);
    audit_log_.push_back(std::move(e));
}

void Coordinator::apply_registration(const Address& addr, const std::string& name,
                                     CapacityClass capacity, const Hash256& poc_hash) {
    HospitalRecord record;
    record.addr = addr;
    record.name = name;
    record.capacity = capacity;
    record.is_registered = true;
    record.poc_hash = poc_hash;
    hospitals_[addr] = std::move(record);
}

void Coordinator::apply_round_start(std::uint64_t round) {
    current_round_ = round;
    round_submitters_[round];  // materialize the empty submitter list
}

void Coordinator::apply_submission(const Address& addr, std::uint64_t round,
                                   const RoundSubmission& submission) {
    submissions_[{round, addr}] = submission;
    round_submitters_[round].push_back(addr);
    HospitalRecord& hospital = hospitals_.at(addr);
    hospital.confidence = submission.confidence;
    hospital.ece = submission.ece;
    hospital.rounds_participated += 1;
}

void Coordinator::apply_ensemble_record(std::uint64_t round, const EnsembleRecord& record) {
    ensembles_[round] = record;
}

void Coordinator::register_hospital(const Address& caller, const std::string& name,
                                    CapacityClass declared_capacity,
                                    const SignedBenchmark& signed_benchmark) {
    if (hospitals_.contains(caller))
        throw ProtocolError(RejectReason::AlreadyRegistered,
                            "address " + hex(caller) + " is already registered");

    if (signed_benchmark.benchmark_hash != hash_benchmark(signed_benchmark.report))
        throw ProtocolError(RejectReason::HashMismatch,
                            "stored benchmark hash does not match the packed report");

    Address signer{};
    try {
        signer = recover_signer(signed_benchmark.benchmark_hash, signed_benchmark.signature);
    } catch (const std::exception& e) {
        throw ProtocolError(RejectReason::SignatureMismatch,
                            std::string("signature unrecoverable: ") + e.what());
    }
    if (signer != caller)
        throw ProtocolError(RejectReason::SignatureMismatch,
                            "benchmark signer " + hex(signer) + " is not the caller");

    if (signed_benchmark.report.declared_capacity != declared_capacity)
        throw ProtocolError(RejectReason::CapacityMismatch,
                            "declared tier differs from the tier signed into the benchmark");
    if (options_.poc_enabled) {
        const CapacityClass benchmarked =
            classify_capacity(signed_benchmark.report.throughput);
        if (benchmarked != declared_capacity)
            throw ProtocolError(
                RejectReason::CapacityMismatch,
                "declared " + std::string(to_string(declared_capacity)) +
                    " but benchmarked throughput classifies as " +
                    std::string(to_string(benchmarked)));
    }

    apply_registration(caller, name, declared_capacity, signed_benchmark.benchmark_hash);
    append_event(EventType::HospitalRegistered,
                 {
                     {"addr", hex(caller)},
                     {"name", name},
                     {"capacity", std::string(to_string(declared_capacity))},
                     {"poc_hash", hex(signed_benchmark.benchmark_hash)},
                     {"signature", to_hex(signed_benchmark.signature)},
                     {"timestamp", tick()},
                 });
}

std::uint64_t Coordinator::start_new_round(const Address& caller) {
    if (caller != owner_)
        throw ProtocolError(RejectReason::NotOwner, "round initiation is owner-managed");
    const std::uint64_t round = current_round_ + 1;
    apply_round_start(round);
    append_event(EventType::RoundStarted, {{"round", round}, {"timestamp", tick()}});
    return round;
}

void Coordinator::submit_update(const Address& caller, const RoundSubmission& submission) {
    if (current_round_ == 0)
        throw ProtocolError(RejectReason::NoOpenRound, "no round has been started");
    const auto it = hospitals_.find(caller);
    if (it == hospitals_.end())
        throw ProtocolError(RejectReason::NotRegistered,
                            "address " + hex(caller) + " is not registered");
    if (submissions_.contains({current_round_, caller}))
        throw ProtocolError(RejectReason::DuplicateSubmission,
                            "at most one submission per round per hospital");
    const ArchitectureFamily expected = assign_architecture(it->second.capacity).family;
    if (submission.model_type != expected)
        throw ProtocolError(RejectReason::ModelTypeMismatch,
                            "submitted " + std::string(to_string(submission.model_type)) +
                                " but capacity requires " + std::string(to_string(expected)));
    if (submission.confidence < 0 || submission.confidence > options_.policy.scale ||
        submission.ece < 0 || submission.ece > options_.policy.scale)
        throw ProtocolError(RejectReason::InvalidReliability,
                            "confidence and ece must lie in [0, scale]");

    RoundSubmission stored = submission;
    stored.timestamp = tick();
    apply_submission(caller, current_round_, stored);
    append_event(EventType::UpdateSubmitted,
                 {
                     {"round", current_round_},
                     {"addr", hex(caller)},
                     {"model_hash", hex(stored.model_hash)},
                     {"confidence", stored.confidence},
                     {"ece", stored.ece},
                     {"model_type", std::string(to_string(stored.model_type))},
                     {"timestamp", stored.timestamp},
                 });
}

Fixed Coordinator::calculate_weight_view(const Address& addr) const {
    const HospitalRecord& record = hospital(addr);
    return calculate_weight(
        record.capacity,
        {record.confidence, record.ece, record.rounds_participated}, options_.policy);
}

void Coordinator::record_ensemble_prediction(const Address& caller, std::uint64_t round,
                                             const Hash256& prediction_hash) {
    if (caller != owner_)
        throw ProtocolError(RejectReason::NotOwner, "ensemble recording is owner-managed");
    const auto submitters = round_submitters_.find(round);
    if (submitters == round_submitters_.end() || submitters->second.empty())
        throw ProtocolError(RejectReason::NoSubmissions,
                            "round " + std::to_string(round) + " has no submissions");
    if (ensembles_.contains(round))
        throw ProtocolError(RejectReason::AlreadyRecorded,
                            "round " + std::to_string(round) + " already has an ensemble record");

    EnsembleRecord record;
    record.prediction_hash = prediction_hash;
    record.participant_count = submitters->second.size();
    record.timestamp = tick();
    apply_ensemble_record(round, record);
    append_event(EventType::EnsembleRecorded,
                 {
                     {"round", round},
                     {"prediction_hash", hex(prediction_hash)},
                     {"participant_count", record.participant_count},
                     {"timestamp", record.timestamp},
                 });
}

bool Coordinator::is_registered(const Address& addr) const { return hospitals_.contains(addr); }

const HospitalRecord& Coordinator::hospital(const Address& addr) const {
    const auto it = hospitals_.find(addr);
    if (it == hospitals_.end())
        throw ProtocolError(RejectReason::NotRegistered,
                            "address " + hex(addr) + " is not registered");
    return it->second;
}

std::vector<Address> Coordinator::registered_addresses() const {
    std::vector<Address> out;
    out.reserve(hospitals_.size());
    for (const auto& [addr, record] : hospitals_) out.push_back(addr);
    return out;
}

const std::vector<Address>& Coordinator::round_submitters(std::uint64_t round) const {
    static const std::vector<Address> kEmpty;
    const auto it = round_submitters_.find(round);
    return it == round_submitters_.end() ? kEmpty : it->second;
}

const RoundSubmission* Coordinator::find_submission(std::uint64_t round,
                                                    const Address& addr) const {
    const auto it = submissions_.find({round, addr});
    return it == submissions_.end() ? nullptr : &it->second;
}

const EnsembleRecord* Coordinator::find_ensemble(std::uint64_t round) const {
    const auto it = ensembles_.find(round);
    return it == ensembles_.end() ? nullptr : &it->second;
}

nlohmann::json Coordinator::state_json() const {
    nlohmann::json hospitals = nlohmann::json::object();
    for (const auto& [addr, record] : hospitals_) {
        hospitals[hex(addr)] = {
            {"name", record.name},
            {"capacity", std::string(to_string(record.capacity))},
            {"is_registered", record.is_registered},
            {"poc_hash", hex(record.poc_hash)},
            {"confidence", record.confidence},
            {"ece", record.ece},
            {"rounds_participated", record.rounds_participated},
        };
    }

    nlohmann::json submissions = nlohmann::json::object();
    for (const auto& [key, submission] : submissions_) {
        submissions[std::to_string(key.first) + ":" + hex(key.second)] = {
            {"model_hash", hex(submission.model_hash)},
            {"confidence", submission.confidence},
            {"ece", submission.ece},
            {"timestamp", submission.timestamp},
            {"model_type", std::string(to_string(submission.model_type))},
        };
    }

    nlohmann::json submitters = nlohmann::json::object();
    for (const auto& [round, list] : round_submitters_) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Address& addr : list) arr.push_back(hex(addr));
        submitters[std::to_string(round)] = std::move(arr);
    }

    nlohmann::json ensembles = nlohmann::json::object();
    for (const auto& [round, record] : ensembles_) {
        ensembles[std::to_string(round)] = {
            {"prediction_hash", hex(record.prediction_hash)},
            {"participant_count", record.participant_count},
            {"timestamp", record.timestamp},
        };
    }

    return {
        {"owner", hex(owner_)},
        {"poc_enabled", options_.poc_enabled},
        {"policy", policy_json(options_.policy)},
        {"clock_next", clock_next_},
        {"current_round", current_round_},
        {"hospitals", std::move(hospitals)},
        {"submissions", std::move(submissions)},
        {"round_submitters", std::move(submitters)},
        {"ensembles", std::move(ensembles)},
        {"audit_length", audit_log_.size()},
        {"audit_head", audit_log_.empty() ? std::string(64, '0') : hex(audit_log_.back().digest)},
    };
}

Hash256 Coordinator::state_digest() const { return sha256(state_json().dump()); }

bool Coordinator::verify_audit_chain(const std::vector<AuditEvent>& log) {
    std::uint64_t ignored = 0;
    return verify_audit_chain(log, ignored);
}

bool Coordinator::verify_audit_chain(const std::vector<AuditEvent>& log,
                                     std::uint64_t& broken_seq) {
    Hash256 prev{};
    for (std::size_t i = 0; i < log.size(); ++i) {
        const AuditEvent& e = log[i];
        if (e.seq != i || e.prev_digest != prev ||
            e.digest != AuditEvent::chain_digest(prev, e.seq, e.event_type, e.payload)) {
            broken_seq = i;
            return false;
        }
        prev = e.digest;
    }
    return true;
}

Coordinator Coordinator::replay(const std::vector<AuditEvent>& log) {
    std::uint64_t broken = 0;
    if (!verify_audit_chain(log, broken))
        throw std::invalid_argument("replay: audit chain broken at seq " +
                                    std::to_string(broken));
    if (log.empty() || log.front().event_type != EventType::Genesis)
        throw std::invalid_argument("replay: log must begin with a genesis event");

    const nlohmann::json& genesis = log.front().payload;
    Options options;
    options.poc_enabled = genesis.at("poc_enabled").get<bool>();
    options.policy = policy_from_json(genesis.at("policy"));
    options.clock_start = genesis.at("clock_start").get<std::int64_t>();

    Coordinator c(ReplayTag{}, address_from_json(genesis, "owner"), options);
    c.audit_log_.push_back(log.front());

    for (std::size_t i = 1; i < log.size(); ++i) {
        const AuditEvent& e = log[i];
        const nlohmann::json& p = e.payload;
        switch (e.event_type) {
            case EventType::Genesis:
                throw std::invalid_argument("replay: duplicate genesis at seq " +
                                            std::to_string(e.seq));
            case EventType::HospitalRegistered:
                c.apply_registration(address_from_json(p, "addr"),
                                     p.at("name").get<std::string>(),
                                     capacity_from_string(p.at("capacity").get<std::string>()),
                                     hash_from_json(p, "poc_hash"));
                break;
            case EventType::RoundStarted:
                c.apply_round_start(p.at("round").get<std::uint64_t>());
                break;
            case EventType::UpdateSubmitted: {
                RoundSubmission submission;
                submission.model_hash = hash_from_json(p, "model_hash");
                submission.confidence = p.at("confidence").get<Fixed>();
                submission.ece = p.at("ece").get<Fixed>();
                submission.timestamp = p.at("timestamp").get<std::int64_t>();
                submission.model_type =
                    family_from_string(p.at("model_type").get<std::string>());
                c.apply_submission(address_from_json(p, "addr"),
                                   p.at("round").get<std::uint64_t>(), submission);
                break;
            }
            case EventType::EnsembleRecorded: {
                EnsembleRecord record;
                record.prediction_hash = hash_from_json(p, "prediction_hash");
                record.participant_count = p.at("participant_count").get<std::uint64_t>();
                record.timestamp = p.at("timestamp").get<std::int64_t>();
                c.apply_ensemble_record(p.at("round").get<std::uint64_t>(), record);
                break;
            }
        }
        if (p.contains("timestamp"))
            c.clock_next_ = p.at("timestamp").get<std::int64_t>() + 1;
        c.audit_log_.push_back(e);
    }
    return c;
}

void Coordinator::write_audit_log(const std::vector<AuditEvent>& log, std::ostream& out) {
    for (const AuditEvent& e : log) out << e.to_json().dump() << '\n';
}

std::vector<AuditEvent> Coordinator::read_audit_log(std::istream& in) {
    std::vector<AuditEvent> log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument("audit log line " + std::to_string(line_no) +
                                        ": " + e.what());
        }
        log.push_back(AuditEvent::from_json(j));
    }
    return log;
}

}  // namespace chainlearn
