#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainlearn/capacity.hpp"

namespace chainlearn {

struct ScenarioReport;  // simulation.hpp

enum class CommMethod { ParamAveraging, LogitExchange, MetadataOnly };

/// Per-hospital per-round coordination payload model. MetadataOnly is the
/// on-chain submission (4 x 32-byte items up, 3 x 32-byte weights down);
/// ParamAveraging ships full parameter tensors both ways; LogitExchange
/// ships a fixed logit payload both ways.
struct CommProfile {
    CommMethod method = CommMethod::MetadataOnly;
    std::uint64_t param_count = kResNet50ParamCount;
    std::uint64_t bytes_per_param = 4;
    std::uint64_t logit_payload_bytes = 4096;
    std::uint64_t upload_items = 4;
    std::uint64_t item_bytes = 32;
    std::uint64_t weight_count = 3;
};

CommProfile param_averaging_profile(std::uint64_t param_count = kResNet50ParamCount);
CommProfile logit_exchange_profile(std::uint64_t payload_bytes = 4096);
CommProfile metadata_profile(std::uint64_t weight_count = 3);

struct PayloadBytes {
    std::uint64_t upload = 0;
    std::uint64_t download = 0;
    std::uint64_t total = 0;

    bool operator==(const PayloadBytes&) const = default;
};

/// Exact integer byte accounting; no floating point involved.
PayloadBytes per_round_bytes(const CommProfile& profile);

/// baseline total bytes / ours total bytes. Throws on a zero denominator.
double reduction_ratio(const CommProfile& baseline, const CommProfile& ours);

struct GasSchedule {
    std::uint64_t register_gas = 174'764;
    std::uint64_t start_round_gas = 48'942;
    std::uint64_t submit_gas = 252'464;
    std::uint64_t record_gas = 94'931;
    std::uint64_t view_gas = 0;  // weight queries are free view calls
    double gwei_per_gas = 20.0;
    double usd_per_eth = 2000.0;
};

/// USD cost of `gas` at the schedule's price point, in cents, rounded
/// half-up: gas * gwei * 1e-9 * usd_per_eth.
std::int64_t usd_cents(const GasSchedule& schedule, std::uint64_t gas);
std::string format_usd(std::int64_t cents);

struct RoundGas {
    std::uint64_t total_gas = 0;
    std::int64_t total_usd_cents = 0;
};

/// One full round: start + one submission per hospital + ensemble record.
RoundGas round_gas(const GasSchedule& schedule, std::uint64_t hospital_count);

struct CostLedger {
    struct Entry {
        std::string op;
        std::uint64_t count = 0;
        std::uint64_t gas_each = 0;
        std::uint64_t gas_total = 0;
        std::int64_t usd_cents_total = 0;
    };
    std::vector<Entry> entries;
    std::uint64_t total_gas = 0;
    std::int64_t total_usd_cents = 0;
    PayloadBytes per_hospital_round_payload{};
    std::uint64_t total_payload_bytes = 0;
};

/// Gas and payload accounting for an executed scenario: registration once
/// per admitted hospital, then per executed round a round start, one
/// submission per accepted update and a record when an ensemble was stored.
/// Rejected calls cost nothing in this model (a live chain would still
/// charge for reverts).
CostLedger ledger_for_scenario(const ScenarioReport& report, const GasSchedule& schedule,
                               const CommProfile& profile);

/// CSV with the per-method payload comparison (method, upload, download,
/// total in bytes).
std::string comm_table_csv(const CommProfile& baseline, const CommProfile& logit,
                           const CommProfile& ours);

/// CSV with per-operation gas and USD plus the per-round total for
/// `hospital_count` hospitals.
std::string gas_table_csv(const GasSchedule& schedule, std::uint64_t hospital_count);

}  // namespace chainlearn
