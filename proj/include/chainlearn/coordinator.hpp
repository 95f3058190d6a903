#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainlearn/capacity.hpp"
#include "chainlearn/errors.hpp"
#include "chainlearn/fixed_point.hpp"
#include "chainlearn/identity.hpp"

namespace chainlearn {

struct HospitalRecord {
    Address addr{};
    std::string name;
    CapacityClass capacity = CapacityClass::Weak;
    bool is_registered = false;
    Hash256 poc_hash{};
    Fixed confidence = 0;
    Fixed ece = 0;
    std::uint64_t rounds_participated = 0;
};

struct RoundSubmission {
    Hash256 model_hash{};
    Fixed confidence = 0;
    Fixed ece = 0;
    std::int64_t timestamp = 0;  // assigned from the logical clock at acceptance
    ArchitectureFamily model_type = ArchitectureFamily::MobileNetV3Small;
};

struct EnsembleRecord {
    Hash256 prediction_hash{};
    std::uint64_t participant_count = 0;
    std::int64_t timestamp = 0;
};

enum class EventType : std::uint8_t {
    Genesis,
    HospitalRegistered,
    RoundStarted,
    UpdateSubmitted,
    EnsembleRecorded,
};

std::string_view to_string(EventType t);
EventType event_type_from_string(std::string_view s);

/// One link of the append-only audit chain. The digest commits to the
/// previous digest plus the canonical bytes of (seq, event_type, payload),
/// so any byte of history is tamper-evident.
struct AuditEvent {
    std::uint64_t seq = 0;
    Hash256 prev_digest{};
    Hash256 digest{};
    EventType event_type = EventType::Genesis;
    nlohmann::json payload;

    /// sha256(prev_digest || compact JSON of {event_type, payload, seq}).
    static Hash256 chain_digest(const Hash256& prev, std::uint64_t seq, EventType type,
                                const nlohmann::json& payload);

    nlohmann::json to_json() const;
    static AuditEvent from_json(const nlohmann::json& j);  // throws std::invalid_argument
};

/// Owner-controlled round machine: registration, round start, constrained
/// submissions, weight views and ensemble records, with every accepted
/// mutation appended to the audit chain. Rejected operations throw
/// ProtocolError and are strict no-ops. Single-writer: mutating calls must
/// be serialized by the caller; const views are safe to share.
class Coordinator {
public:
    struct Options {
        bool poc_enabled = true;  // registration cross-checks declared tier vs throughput
        std::int64_t clock_start = 1;
        PolicyConstants policy{};
    };

    explicit Coordinator(const Address& owner);
    Coordinator(const Address& owner, Options options);

    /// Admission checks, in order: AlreadyRegistered, HashMismatch (stored
    /// hash vs recomputed pack hash), SignatureMismatch (recovered signer
    /// must equal the caller), CapacityMismatch (declared tier must match
    /// the report's declared tier; with proof-of-capacity enabled it must
    /// also match the tier implied by benchmarked throughput).
    void register_hospital(const Address& caller, const std::string& name,
                           CapacityClass declared_capacity, const SignedBenchmark& signed_benchmark);

    /// Owner only. Returns the new round number (rounds are 1-based).
    std::uint64_t start_new_round(const Address& caller);

    /// Constraint order: NoOpenRound, NotRegistered, DuplicateSubmission,
    /// ModelTypeMismatch, InvalidReliability. On acceptance the input's
    /// timestamp is replaced by the logical clock, the hospital's
    /// reliability tuple is overwritten and rounds_participated increments,
    /// so same-round weight views already reflect the new tuple.
    void submit_update(const Address& caller, const RoundSubmission& submission);

    /// Pure view over the hospital's current capacity and reliability.
    Fixed calculate_weight_view(const Address& addr) const;

    /// Owner only; requires at least one submission in `round` and no prior
    /// record. participant_count is the round's accepted-submission count.
    void record_ensemble_prediction(const Address& caller, std::uint64_t round,
                                    const Hash256& prediction_hash);

    // views
    const Address& owner() const { return owner_; }
    bool poc_enabled() const { return options_.poc_enabled; }
    const PolicyConstants& policy() const { return options_.policy; }
    std::uint64_t current_round() const { return current_round_; }
    bool is_registered(const Address& addr) const;
    const HospitalRecord& hospital(const Address& addr) const;  // throws NotRegistered
    std::vector<Address> registered_addresses() const;
    const std::vector<Address>& round_submitters(std::uint64_t round) const;
    const RoundSubmission* find_submission(std::uint64_t round, const Address& addr) const;
    const EnsembleRecord* find_ensemble(std::uint64_t round) const;
    const std::vector<AuditEvent>& audit_log() const { return audit_log_; }

    /// Canonical JSON of the full state (ordered maps, hex digests); two
    /// coordinators with equal state serialize byte-identically.
    nlohmann::json state_json() const;
    Hash256 state_digest() const;

    /// Recomputes every link of the chain. True iff the log is empty or
    /// every stored digest matches its recomputation.
    static bool verify_audit_chain(const std::vector<AuditEvent>& log);
    /// As above, reporting the first broken sequence number via `broken_seq`.
    static bool verify_audit_chain(const std::vector<AuditEvent>& log, std::uint64_t& broken_seq);

    /// Reconstructs a coordinator from its audit log. The chain is
    /// re-derived event by event; a tampered or truncated log throws
    /// std::invalid_argument. Replayed state is bit-identical to the
    /// original, including the audit chain itself.
    static Coordinator replay(const std::vector<AuditEvent>& log);

    /// JSON-lines persistence, one event object per line.
    static void write_audit_log(const std::vector<AuditEvent>& log, std::ostream& out);
    static std::vector<AuditEvent> read_audit_log(std::istream& in);

private:
    struct ReplayTag {};
    Coordinator(ReplayTag, const Address& owner, Options options);

    std::int64_t tick();
    void append_event(EventType type, nlohmann::json payload);

    void apply_registration(const Address& addr, const std::string& name, CapacityClass capacity,
                            const Hash256& poc_hash);
    void apply_round_start(std::uint64_t round);
    void apply_submission(const Address& addr, std::uint64_t round, const RoundSubmission& submission);
    void apply_ensemble_record(std::uint64_t round, const EnsembleRecord& record);

    Address owner_;
    Options options_;
    std::int64_t clock_next_ = 1;
    std::uint64_t current_round_ = 0;
    std::map<Address, HospitalRecord> hospitals_;
    std::map<std::pair<std::uint64_t, Address>, RoundSubmission> submissions_;
    std::map<std::uint64_t, std::vector<Address>> round_submitters_;
    std::map<std::uint64_t, EnsembleRecord> ensembles_;
    std::vector<AuditEvent> audit_log_;
};

}  // namespace chainlearn
