// Operator entry point: scenario runs, benchmarks, cost tables, audit
// verification/replay and the spoofing demonstration.
//
// Exit codes: 0 success, 1 verification/assertion failure, 2 input error,
// 3 runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "chainlearn/coordinator.hpp"
#include "chainlearn/cost_model.hpp"
#include "chainlearn/simulation.hpp"

namespace fs = std::filesystem;
using namespace chainlearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitRuntimeError = 3;

nlohmann::json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file " + path.string());
    out << contents;
}

/// Seed precedence: --seed flag, then the config file, then CHAINLEARN_SEED,
/// then the built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           const nlohmann::json& config_json, std::uint64_t config_seed) {
    if (flag_seed) return *flag_seed;
    if (config_json.contains("seed")) return config_seed;
    if (const char* env = std::getenv("CHAINLEARN_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("CHAINLEARN_SEED is not an unsigned integer");
        }
    }
    return config_seed;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            const std::optional<std::uint64_t>& seed_flag) {
    const nlohmann::json config_json = load_json(config_path);
    ScenarioConfig cfg = scenario_config_from_json(config_json);
    cfg.seed = resolve_seed(seed_flag, config_json, cfg.seed);

    const ScenarioResult result = run_scenario(cfg);

    fs::create_directories(out_dir);
    write_file(out_dir / "report.json", result.report.to_json().dump(2) + "\n");
    write_file(out_dir / "metrics.csv", result.report.metrics_csv());
    std::ofstream audit(out_dir / "audit.jsonl", std::ios::binary);
    if (!audit)
        throw std::runtime_error("cannot write file " + (out_dir / "audit.jsonl").string());
    Coordinator::write_audit_log(result.audit, audit);

    std::cout << "wrote " << (out_dir / "report.json").string() << ", metrics.csv, audit.jsonl"
              << " (seed " << cfg.seed << ")\n";
    return kExitOk;
}

int cmd_benchmark(bool injected, double injected_throughput, std::uint32_t steps,
                  std::uint32_t batch, std::uint32_t warmup) {
    BenchmarkWorkload workload;
    workload.warmup_steps = warmup;
    if (injected) {
        workload.mode = BenchmarkWorkload::Mode::Injected;
        workload.injected_throughput = injected_throughput;
    }
    const BenchmarkReport report = run_benchmark(workload, steps, batch);
    const nlohmann::json out = {
        {"throughput_samples_per_s", report.throughput},
        {"steps", report.steps},
        {"batch_size", report.batch_size},
        {"tier", std::string(to_string(report.declared_capacity))},
        {"architecture",
         std::string(to_string(assign_architecture(report.declared_capacity).family))},
        {"benchmark_hash", to_hex(hash_benchmark(report))},
    };
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_costs(const fs::path& out_dir, std::uint64_t hospitals) {
    const GasSchedule schedule;
    const std::string comm = comm_table_csv(param_averaging_profile(), logit_exchange_profile(),
                                            metadata_profile());
    const std::string gas = gas_table_csv(schedule, hospitals);

    fs::create_directories(out_dir);
    write_file(out_dir / "comm_table.csv", comm);
    write_file(out_dir / "gas_table.csv", gas);
    std::cout << comm << '\n' << gas;
    return kExitOk;
}

int cmd_verify(const fs::path& log_path) {
    std::ifstream in(log_path);
    if (!in)
        throw std::invalid_argument("cannot open file " + log_path.string());
    std::vector<AuditEvent> log;
    try {
        log = Coordinator::read_audit_log(in);
    } catch (const std::invalid_argument& e) {
        std::cout << "audit chain UNREADABLE: " << e.what() << '\n';
        return kExitVerifyFailed;
    }
    std::uint64_t broken = 0;
    if (!Coordinator::verify_audit_chain(log, broken)) {
        std::cout << "audit chain BROKEN at seq " << broken << '\n';
        return kExitVerifyFailed;
    }
    std::cout << "audit chain OK (" << log.size() << " events)\n";
    return kExitOk;
}

int cmd_replay(const fs::path& log_path) {
    std::ifstream in(log_path);
    if (!in)
        throw std::invalid_argument("cannot open file " + log_path.string());
    std::vector<AuditEvent> log;
    try {
        log = Coordinator::read_audit_log(in);
    } catch (const std::invalid_argument& e) {
        std::cout << "audit chain UNREADABLE: " << e.what() << '\n';
        return kExitVerifyFailed;
    }
    std::uint64_t broken = 0;
    if (!Coordinator::verify_audit_chain(log, broken)) {
        std::cout << "audit chain BROKEN at seq " << broken << '\n';
        return kExitVerifyFailed;
    }
    const Coordinator replayed = Coordinator::replay(log);
    const nlohmann::json out = {
        {"events", log.size()},
        {"current_round", replayed.current_round()},
        {"hospitals", replayed.registered_addresses().size()},
        {"state_digest", to_hex(replayed.state_digest())},
    };
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_spoof(const fs::path& config_path, const fs::path& out_dir,
              const std::optional<std::uint64_t>& seed_flag) {
    const nlohmann::json config_json = load_json(config_path);
    ScenarioConfig cfg = scenario_config_from_json(config_json);
    cfg.seed = resolve_seed(seed_flag, config_json, cfg.seed);

    AttackerSpec attacker;
    if (config_json.contains("attacker"))
        attacker = attacker_spec_from_json(config_json["attacker"]);

    const SpoofReport report = run_spoofing_scenario(cfg, attacker);

    fs::create_directories(out_dir);
    write_file(out_dir / "spoof_report.json", report.to_json().dump(2) + "\n");

    for (const SpoofArmSummary* arm :
         {&report.honest, &report.spoofed_no_poc, &report.spoofed_poc}) {
        std::cout << arm->arm << ": participants " << arm->participant_count << ", accuracy "
                  << arm->ensemble_accuracy << ", attacker " << arm->attacker_status << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity-aware federated ensemble coordinator and simulator"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed_flag;
    fs::path config_path;
    fs::path out_dir = "out";
    fs::path log_path;
    std::uint64_t hospitals = 3;
    bool injected = false;
    double injected_throughput = 0.0;
    std::uint32_t steps = 50;
    std::uint32_t batch = 32;
    std::uint32_t warmup = 5;

    CLI::App* run = app.add_subcommand("run", "run a scenario from a JSON config");
    run->add_option("-c,--config", config_path, "scenario config JSON")->required();
    run->add_option("-o,--out", out_dir, "output directory");
    run->add_option("-s,--seed", seed_flag,
                    "seed override (beats the config file and CHAINLEARN_SEED)");

    CLI::App* benchmark =
        app.add_subcommand("benchmark", "measure (or inject) throughput and classify it");
    benchmark->add_flag("--injected", injected, "skip measurement, use --throughput");
    benchmark->add_option("--throughput", injected_throughput,
                          "injected throughput in samples/s");
    benchmark->add_option("--steps", steps, "benchmark steps");
    benchmark->add_option("--batch", batch, "benchmark batch size");
    benchmark->add_option("--warmup", warmup, "warm-up steps before timing");

    CLI::App* costs = app.add_subcommand("costs", "emit payload and gas cost tables as CSV");
    costs->add_option("-o,--out", out_dir, "output directory");
    costs->add_option("--hospitals", hospitals, "hospital count for the per-round total");

    CLI::App* verify = app.add_subcommand("verify", "verify an audit log's hash chain");
    verify->add_option("log", log_path, "audit JSON-lines file")->required();

    CLI::App* replay = app.add_subcommand("replay", "rebuild coordinator state from an audit log");
    replay->add_option("log", log_path, "audit JSON-lines file")->required();

    CLI::App* spoof = app.add_subcommand("spoof", "run the three-arm capacity spoofing scenario");
    spoof->add_option("-c,--config", config_path, "scenario config JSON")->required();
    spoof->add_option("-o,--out", out_dir, "output directory");
    spoof->add_option("-s,--seed", seed_flag, "seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_flag);
        if (benchmark->parsed())
            return cmd_benchmark(injected, injected_throughput, steps, batch, warmup);
        if (costs->parsed()) return cmd_costs(out_dir, hospitals);
        if (verify->parsed()) return cmd_verify(log_path);
        if (replay->parsed()) return cmd_replay(log_path);
        if (spoof->parsed()) return cmd_spoof(config_path, out_dir, seed_flag);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return kExitInputError;
}
