#include "chainlearn/cost_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chainlearn/simulation.hpp"

namespace chainlearn {

CommProfile param_averaging_profile(std::uint64_t param_count) {
    CommProfile p;
    p.method = CommMethod::ParamAveraging;
    p.param_count = param_count;
    return p;
}

CommProfile logit_exchange_profile(std::uint64_t payload_bytes) {
    CommProfile p;
    p.method = CommMethod::LogitExchange;
    p.logit_payload_bytes = payload_bytes;
    return p;
}

CommProfile metadata_profile(std::uint64_t weight_count) {
    CommProfile p;
    p.method = CommMethod::MetadataOnly;
    p.weight_count = weight_count;
    return p;
}

PayloadBytes per_round_bytes(const CommProfile& profile) {
    PayloadBytes out;
    switch (profile.method) {
        case CommMethod::ParamAveraging:
            out.upload = profile.param_count * profile.bytes_per_param;
            out.download = out.upload;
            break;
        case CommMethod::LogitExchange:
            out.upload = profile.logit_payload_bytes;
            out.download = profile.logit_payload_bytes;
            break;
        case CommMethod::MetadataOnly:
            out.upload = profile.upload_items * profile.item_bytes;
            out.download = profile.weight_count * profile.item_bytes;
            break;
    }
    out.total = out.upload + out.download;
    return out;
}

double reduction_ratio(const CommProfile& baseline, const CommProfile& ours) {
    const PayloadBytes b = per_round_bytes(baseline);
    const PayloadBytes o = per_round_bytes(ours);
    if (o.total == 0) throw std::invalid_argument("reduction_ratio: zero denominator");
    return static_cast<double>(b.total) / static_cast<double>(o.total);
}

std::int64_t usd_cents(const GasSchedule& schedule, std::uint64_t gas) {
    const double usd = static_cast<double>(gas) * schedule.gwei_per_gas * 1e-9 *
                       schedule.usd_per_eth;
    return static_cast<std::int64_t>(std::floor(usd * 100.0 + 0.5));
}

std::string format_usd(std::int64_t cents) {
    std::ostringstream out;
    out << '$' << cents / 100 << '.';
    const std::int64_t rem = cents % 100;
    out << (rem < 10 ? "0" : "") << rem;
    return out.str();
}

RoundGas round_gas(const GasSchedule& schedule, std::uint64_t hospital_count) {
    if (hospital_count < 1)
        throw std::invalid_argument("round_gas: hospital_count must be >= 1");
    RoundGas out;
    out.total_gas = schedule.start_round_gas + hospital_count * schedule.submit_gas +
                    schedule.record_gas;
    out.total_usd_cents = usd_cents(schedule, out.total_gas);
    return out;
}

CostLedger ledger_for_scenario(const ScenarioReport& report, const GasSchedule& schedule,
                               const CommProfile& profile) {
    std::uint64_t registered = 0;
    for (const auto& r : report.registrations)
        if (r.accepted) ++registered;

    std::uint64_t rounds = 0;
    std::uint64_t submissions = 0;
    std::uint64_t records = 0;
    for (const auto& round : report.rounds) {
        ++rounds;
        submissions += round.accepted_count;
        if (round.recorded) ++records;
    }

    CostLedger ledger;
    const auto add = [&](const std::string& op, std::uint64_t count, std::uint64_t gas_each) {
        CostLedger::Entry e;
        e.op = op;
        e.count = count;
        e.gas_each = gas_each;
        e.gas_total = count * gas_each;
        e.usd_cents_total = usd_cents(schedule, e.gas_total);
        ledger.total_gas += e.gas_total;
        ledger.entries.push_back(std::move(e));
    };
    add("registerHospital", registered, schedule.register_gas);
    add("startNewRound", rounds, schedule.start_round_gas);
    add("submitUpdate", submissions, schedule.submit_gas);
    add("calculateWeight", submissions, schedule.view_gas);
    add("recordEnsemblePrediction", records, schedule.record_gas);
    ledger.total_usd_cents = usd_cents(schedule, ledger.total_gas);

    ledger.per_hospital_round_payload = per_round_bytes(profile);
    ledger.total_payload_bytes = ledger.per_hospital_round_payload.upload * submissions +
                                 ledger.per_hospital_round_payload.download * submissions;
    return ledger;
}

std::string comm_table_csv(const CommProfile& baseline, const CommProfile& logit,
                           const CommProfile& ours) {
    std::ostringstream out;
    out << "method,upload_bytes,download_bytes,total_bytes\n";
    const auto row = [&](const char* name, const CommProfile& p) {
        const PayloadBytes b = per_round_bytes(p);
        out << name << ',' << b.upload << ',' << b.download << ',' << b.total << '\n';
    };
    row("FedAvg/FedProx", baseline);
    row("FedMD", logit);
    row("Ours", ours);
    return out.str();
}

std::string gas_table_csv(const GasSchedule& schedule, std::uint64_t hospital_count) {
    std::ostringstream out;
    out << "operation,gas,usd,frequency\n";
    const auto row = [&](const char* op, std::uint64_t gas, const char* freq) {
        out << op << ',' << gas << ',' << format_usd(usd_cents(schedule, gas)) << ','
            << freq << '\n';
    };
    row("registerHospital", schedule.register_gas, "once per hospital");
    row("startNewRound", schedule.start_round_gas, "once per round");
    row("submitUpdate", schedule.submit_gas, "per hospital/round");
    row("calculateWeight", schedule.view_gas, "per hospital/round");
    row("recordEnsemblePrediction", schedule.record_gas, "once per round");
    const RoundGas total = round_gas(schedule, hospital_count);
    out << "total_per_round_" << hospital_count << "_hospitals," << total.total_gas << ','
        << format_usd(total.total_usd_cents) << ",\n";
    return out.str();
}

}  // namespace chainlearn
