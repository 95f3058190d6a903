#include <doctest.h>

#include <cmath>

#include "chainlearn/cost_model.hpp"
#include "chainlearn/simulation.hpp"

using namespace chainlearn;

TEST_CASE("per-round payload bytes") {
    CHECK(per_round_bytes(metadata_profile()) == PayloadBytes{128, 96, 224});
    CHECK(per_round_bytes(param_averaging_profile()) ==
          PayloadBytes{102'228'128, 102'228'128, 204'456'256});
    CHECK(per_round_bytes(logit_exchange_profile()) == PayloadBytes{4096, 4096, 8192});
}

TEST_CASE("reduction ratio") {
    const double ratio = reduction_ratio(param_averaging_profile(), metadata_profile());
    CHECK(static_cast<std::uint64_t>(std::floor(ratio)) == 912'751);
    CHECK(per_round_bytes(param_averaging_profile()).total / per_round_bytes(metadata_profile()).total ==
          912'751);

    CHECK(reduction_ratio(metadata_profile(), metadata_profile()) == 1.0);

    // doubling the parameter count doubles the ratio
    const double doubled =
        reduction_ratio(param_averaging_profile(2 * kResNet50ParamCount), metadata_profile());
    CHECK(doubled == doctest::Approx(2.0 * ratio).epsilon(1e-12));
}

TEST_CASE("gas schedule arithmetic") {
    const GasSchedule schedule;

    const RoundGas three = round_gas(schedule, 3);
    CHECK(three.total_gas == 901'265);
    CHECK(three.total_usd_cents == 3605);
    CHECK(format_usd(three.total_usd_cents) == "$36.05");

    const RoundGas one = round_gas(schedule, 1);
    CHECK(one.total_gas == 396'337);
    CHECK(one.total_usd_cents == 1585);

    CHECK(usd_cents(schedule, schedule.register_gas) == 699);
    CHECK(format_usd(usd_cents(schedule, schedule.register_gas)) == "$6.99");
    CHECK(usd_cents(schedule, schedule.start_round_gas) == 196);
    CHECK(usd_cents(schedule, schedule.submit_gas) == 1010);
    CHECK(usd_cents(schedule, schedule.record_gas) == 380);
    CHECK(usd_cents(schedule, schedule.view_gas) == 0);

    CHECK_THROWS_AS(round_gas(schedule, 0), std::invalid_argument);
}

TEST_CASE("scenario ledger composes registrations and rounds") {
    ScenarioConfig cfg;
    cfg.hospitals = {
        {"a", CapacityClass::Weak, 50.0, {0.8, 4.0, 1.0}},
        {"b", CapacityClass::Medium, 150.0, {0.8, 4.0, 1.0}},
        {"c", CapacityClass::Strong, 400.0, {0.8, 4.0, 1.0}},
    };
    cfg.rounds = 5;
    cfg.task.val_size = 40;
    cfg.task.test_size = 40;
    cfg.train_pool_size = 100;
    cfg.seed = 3;

    const GasSchedule schedule;
    const ScenarioResult result = run_scenario(cfg);
    const CostLedger ledger = ledger_for_scenario(result.report, schedule, metadata_profile());

    // full attendance: 3 registrations + 5 full rounds
    CHECK(ledger.total_gas == 3 * 174'764 + 5 * 901'265);
    CHECK(ledger.per_hospital_round_payload.total == 224);
    CHECK(ledger.total_payload_bytes == 224 * 15);

    // entries are additive
    std::uint64_t sum = 0;
    for (const auto& entry : ledger.entries) sum += entry.gas_total;
    CHECK(sum == ledger.total_gas);
}

TEST_CASE("ledger with empty rounds charges the start only") {
    ScenarioConfig cfg;
    cfg.hospitals = {{"solo", CapacityClass::Medium, 150.0, {0.9, 4.0, 1.0}}};
    cfg.rounds = 1;
    cfg.task.val_size = 20;
    cfg.task.test_size = 20;
    cfg.train_pool_size = 50;
    cfg.attendance.medium = 0.0;  // never attends, so the round executes empty

    const ScenarioResult result = run_scenario(cfg);
    const CostLedger ledger =
        ledger_for_scenario(result.report, GasSchedule{}, metadata_profile());
    // one registration + one empty round start, no submissions, no record
    CHECK(ledger.total_gas == 174'764 + 48'942);
}

TEST_CASE("ledger with no executed rounds is registration gas only") {
    ScenarioReport report;
    RegistrationOutcome a;
    a.name = "a";
    a.accepted = true;
    RegistrationOutcome b;
    b.name = "b";
    b.accepted = true;
    RegistrationOutcome rejected;
    rejected.name = "c";
    rejected.accepted = false;  // reverted registrations cost nothing here
    report.registrations = {a, b, rejected};

    const CostLedger ledger =
        ledger_for_scenario(report, GasSchedule{}, metadata_profile());
    CHECK(ledger.total_gas == 2 * 174'764);
    CHECK(ledger.total_payload_bytes == 0);
}

TEST_CASE("csv tables carry the headline rows") {
    const std::string comm =
        comm_table_csv(param_averaging_profile(), logit_exchange_profile(), metadata_profile());
    CHECK(comm.find("Ours,128,96,224") != std::string::npos);
    CHECK(comm.find("FedAvg/FedProx,102228128,102228128,204456256") != std::string::npos);

    const std::string gas = gas_table_csv(GasSchedule{}, 3);
    CHECK(gas.find("registerHospital,174764,$6.99") != std::string::npos);
    CHECK(gas.find("total_per_round_3_hospitals,901265,$36.05") != std::string::npos);

    const std::string gas5 = gas_table_csv(GasSchedule{}, 5);
    CHECK(gas5.find(std::to_string(48'942 + 5 * 252'464 + 94'931)) != std::string::npos);
}
