#!/usr/bin/env python3
"""Exit-code and file contract checks for the command-line tool.

Usage: cli_tests.py <cli-binary> <configs-dir>
"""
import json
import os
import subprocess
import sys
import tempfile

FAILURES = 0


def check(name, ok, detail=""):
    global FAILURES
    print(("[PASS] " if ok else "[FAIL] ") + name + ((" - " + detail) if detail else ""))
    if not ok:
        FAILURES += 1


def run(cli, *args, env_extra=None):
    env = os.environ.copy()
    env.pop("CHAINLEARN_SEED", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([cli, *args], capture_output=True, text=True, env=env)


def main():
    cli, configs = sys.argv[1], sys.argv[2]
    demo = os.path.join(configs, "demo_federation.json")
    spoof = os.path.join(configs, "spoof_demo.json")

    with tempfile.TemporaryDirectory() as tmp:
        out_a = os.path.join(tmp, "a")
        out_b = os.path.join(tmp, "b")

        # run: success, outputs exist
        r = run(cli, "run", "-c", demo, "-o", out_a)
        check("run exits 0", r.returncode == 0, r.stderr)
        for name in ("report.json", "metrics.csv", "audit.jsonl"):
            check(f"run wrote {name}", os.path.exists(os.path.join(out_a, name)))

        # determinism: identical config+seed -> byte-identical outputs
        r = run(cli, "run", "-c", demo, "-o", out_b)
        check("second run exits 0", r.returncode == 0, r.stderr)
        for name in ("report.json", "metrics.csv", "audit.jsonl"):
            with open(os.path.join(out_a, name), "rb") as fa, \
                 open(os.path.join(out_b, name), "rb") as fb:
                check(f"{name} byte-identical across runs", fa.read() == fb.read())

        # seed flag beats config seed
        out_c = os.path.join(tmp, "c")
        r = run(cli, "run", "-c", demo, "-o", out_c, "--seed", "777")
        check("seed override exits 0", r.returncode == 0, r.stderr)
        with open(os.path.join(out_c, "report.json")) as f:
            check("seed override applied", json.load(f)["seed"] == 777)

        # malformed config -> exit 2, message names the field
        bad_path = os.path.join(tmp, "bad.json")
        with open(demo) as f:
            cfg = json.load(f)
        cfg["rounds"] = "many"
        with open(bad_path, "w") as f:
            json.dump(cfg, f)
        r = run(cli, "run", "-c", bad_path, "-o", os.path.join(tmp, "bad_out"))
        check("malformed config exits 2", r.returncode == 2, str(r.returncode))
        check("error names the field", "rounds" in (r.stderr + r.stdout))

        # non-JSON config -> exit 2
        with open(bad_path, "w") as f:
            f.write("{not json")
        r = run(cli, "run", "-c", bad_path, "-o", os.path.join(tmp, "bad_out2"))
        check("unparseable config exits 2", r.returncode == 2)

        # verify: untampered log -> 0
        audit = os.path.join(out_a, "audit.jsonl")
        r = run(cli, "verify", audit)
        check("verify accepts untampered log", r.returncode == 0, r.stdout)

        # verify: empty log -> 0
        empty = os.path.join(tmp, "empty.jsonl")
        open(empty, "w").close()
        r = run(cli, "verify", empty)
        check("verify accepts empty log", r.returncode == 0, r.stdout)

        # verify: byte-flipped log -> 1 and reports a sequence number
        with open(audit, "rb") as f:
            blob = bytearray(f.read())
        # flip one hex digit inside the second line's payload region
        second_line_start = blob.index(b"\n") + 1
        target = blob.index(b'"payload"', second_line_start) + 15
        blob[target] = ord("9") if blob[target] != ord("9") else ord("8")
        tampered = os.path.join(tmp, "tampered.jsonl")
        with open(tampered, "wb") as f:
            f.write(blob)
        r = run(cli, "verify", tampered)
        check("verify rejects byte-flipped log", r.returncode == 1, r.stdout)
        check("verify reports a location", ("seq" in r.stdout) or ("UNREADABLE" in r.stdout),
              r.stdout)

        # verify: missing file -> 2
        r = run(cli, "verify", os.path.join(tmp, "missing.jsonl"))
        check("verify missing file exits 2", r.returncode == 2)

        # replay prints state summary
        r = run(cli, "replay", audit)
        check("replay exits 0", r.returncode == 0, r.stderr)
        check("replay prints a state digest", "state_digest" in r.stdout)

        # replay refuses a tampered chain with the verification exit code
        r = run(cli, "replay", tampered)
        check("replay rejects tampered log with exit 1", r.returncode == 1, str(r.returncode))

        # costs tables
        out_costs = os.path.join(tmp, "costs")
        r = run(cli, "costs", "-o", out_costs)
        check("costs exits 0", r.returncode == 0, r.stderr)
        with open(os.path.join(out_costs, "comm_table.csv")) as f:
            check("comm table has the metadata row", "Ours,128,96,224" in f.read())
        with open(os.path.join(out_costs, "gas_table.csv")) as f:
            check("gas table has the 3-hospital total", "901265,$36.05" in f.read())
        r = run(cli, "costs", "-o", out_costs, "--hospitals", "5")
        total5 = 48942 + 5 * 252464 + 94931
        with open(os.path.join(out_costs, "gas_table.csv")) as f:
            check("gas table scales with hospitals", str(total5) in f.read())

        # spoof: three arms with enforcement semantics
        out_spoof = os.path.join(tmp, "spoof")
        r = run(cli, "spoof", "-c", spoof, "-o", out_spoof)
        check("spoof exits 0", r.returncode == 0, r.stderr)
        with open(os.path.join(out_spoof, "spoof_report.json")) as f:
            rep = json.load(f)
        arms = {a["arm"]: a for a in rep["summary"]}
        check("spoof PoC arm rejects the attacker",
              arms["spoofed_poc"]["attacker_status"] == "CapacityMismatch")
        check("spoof PoC arm shrinks to the honest subset",
              arms["spoofed_poc"]["participant_count"]
              == arms["honest"]["participant_count"] - 1)
        check("spoof no-PoC arm includes the attacker",
              arms["spoofed_no_poc"]["attacker_included"] is True)

        # spoof determinism
        out_spoof2 = os.path.join(tmp, "spoof2")
        run(cli, "spoof", "-c", spoof, "-o", out_spoof2)
        with open(os.path.join(out_spoof, "spoof_report.json"), "rb") as fa, \
             open(os.path.join(out_spoof2, "spoof_report.json"), "rb") as fb:
            check("spoof report byte-identical across runs", fa.read() == fb.read())

        # benchmark: injected JSON output
        r = run(cli, "benchmark", "--injected", "--throughput", "350")
        check("benchmark exits 0", r.returncode == 0, r.stderr)
        bench = json.loads(r.stdout)
        check("benchmark reports strong tier", bench["tier"] == "strong")
        check("benchmark reports the architecture", bench["architecture"] == "ResNet50")
        check("benchmark reports a hash", len(bench["benchmark_hash"]) == 64)

        # CHAINLEARN_SEED applies only when config omits the seed
        no_seed = os.path.join(tmp, "no_seed.json")
        with open(demo) as f:
            cfg = json.load(f)
        del cfg["seed"]
        with open(no_seed, "w") as f:
            json.dump(cfg, f)
        out_env = os.path.join(tmp, "env")
        r = run(cli, "run", "-c", no_seed, "-o", out_env,
                env_extra={"CHAINLEARN_SEED": "555"})
        check("env seed run exits 0", r.returncode == 0, r.stderr)
        with open(os.path.join(out_env, "report.json")) as f:
            check("env seed applied", json.load(f)["seed"] == 555)
        out_env2 = os.path.join(tmp, "env2")
        r = run(cli, "run", "-c", demo, "-o", out_env2,
                env_extra={"CHAINLEARN_SEED": "555"})
        with open(os.path.join(out_env2, "report.json")) as f:
            check("config seed beats env seed", json.load(f)["seed"] == 42)

        # unknown subcommand -> input error
        r = run(cli, "frobnicate")
        check("unknown subcommand exits 2", r.returncode == 2)

    print("cli contract: %d failure(s)" % FAILURES)
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
