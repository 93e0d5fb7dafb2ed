import hashlib
import json
import subprocess
import sys

import pytest

from diqkd import __version__
from diqkd.cli import (
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY_FAILED,
    SCHEMA,
    main,
)

REGION = ["region", "--beta-min", "2.3", "--beta-max", "2.8", "--qber-min", "0", "--qber-max", "0.05",
          "--grid", "3x3", "--attack", "collective-aep", "--thresholds", "1e6,1e8"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestEnvelope:
    def test_rate_envelope(self, capsys):
        code, out, _ = run(capsys, "rate", "--attack", "collective-aep", "--depolarizing", "--qber", "0.005",
                           "--rounds", "1e7")
        assert code == EXIT_OK
        env = json.loads(out)
        assert set(env) == {"schema", "tool", "version", "command", "config", "result", "timestamp"}
        assert env["schema"] == SCHEMA
        assert env["version"] == __version__
        assert env["timestamp"] is None
        assert env["config"]["rounds"] == 10**7
        result = env["result"]
        assert result["feasible"] and result["rate"] > 0
        total = result["entropy_term"] - result["ec_leakage"] - result["sqrt_n_corrections"] - result["constant_penalties"]
        assert total == pytest.approx(result["total_l"], rel=1e-9)

    def test_timestamp_opt_in(self, capsys):
        code, out, _ = run(capsys, "verify-h2", "--grid-points", "2", "--timestamp")
        assert code == EXIT_OK
        assert json.loads(out)["timestamp"] is not None

    def test_twelve_significant_digits(self, capsys):
        _, out, _ = run(capsys, "rate", "--attack", "collective-aep", "--beta", "2.6", "--qber", "0.01",
                        "--rounds", "1e7")
        rate = json.loads(out)["result"]["rate"]
        assert len(repr(rate).replace("0.", "", 1).lstrip("0").replace(".", "").split("e")[0]) <= 12


class TestExitCodes:
    def test_infeasible(self, capsys):
        code, out, _ = run(capsys, "rate", "--attack", "coherent", "--beta", "2.0", "--qber", "0.01", "--rounds", "1e12")
        assert code == EXIT_INFEASIBLE
        assert json.loads(out)["result"]["feasible"] is False

    def test_conflict_names_pair(self, capsys):
        code, _, err = run(capsys, "rate", "--attack", "coherent", "--beta", "2.5", "--nu", "0.1", "--rounds", "1e8")
        assert code == EXIT_USAGE
        assert "--beta conflicts with --nu" in err

    def test_missing_point(self, capsys):
        code, _, _ = run(capsys, "rate", "--attack", "coherent", "--rounds", "1e8")
        assert code == EXIT_USAGE

    def test_unknown_flag(self, capsys):
        code, _, _ = run(capsys, "rate", "--bogus")
        assert code == EXIT_USAGE

    def test_seed_required(self, capsys):
        code, _, err = run(capsys, "simulate", "--protocol", "2", "--gamma", "0.5", "--rounds", "1000")
        assert code == EXIT_USAGE
        assert "seed" in err

    def test_unwritable_out(self, capsys, tmp_path):
        code, _, _ = run(capsys, "verify-h2", "--grid-points", "2", "--out", str(tmp_path / "missing" / "x.json"))
        assert code == EXIT_USAGE

    def test_verify_pass_and_fail(self, capsys):
        code, out, _ = run(capsys, "verify-h2", "--grid-points", "2")
        assert code == EXIT_OK
        assert json.loads(out)["result"]["passed"] is True
        code, _, _ = run(capsys, "verify-h2", "--grid-points", "3", "--inject-perturbation", "1e-6")
        assert code == EXIT_VERIFY_FAILED

    def test_verify_default_grid(self, capsys):
        code, out, _ = run(capsys, "verify-h2")
        assert code == EXIT_OK
        assert json.loads(out)["result"]["max_deviation"] <= 1e-9

    def test_min_rounds_infeasible(self, capsys):
        code, out, _ = run(capsys, "min-rounds", "--attack", "collective-aep", "--beta", "2.0", "--qber", "0.01")
        assert code == EXIT_INFEASIBLE
        assert json.loads(out)["result"]["min_rounds"] == "infeasible"


class TestMinRounds:
    def test_h2_below_aep_at_low_noise(self, capsys):
        values = {}
        for attack in ("collective-h2", "collective-aep"):
            code, out, _ = run(capsys, "min-rounds", "--attack", attack, "--depolarizing", "--qber", "0.0001")
            assert code == EXIT_OK
            values[attack] = json.loads(out)["result"]["min_rounds"]
        assert values["collective-h2"] < values["collective-aep"]

    def test_history_printed(self, capsys):
        _, out, _ = run(capsys, "min-rounds", "--attack", "collective-aep", "--beta", "2.47", "--qber", "0.051")
        result = json.loads(out)["result"]
        assert 1.5e6 <= result["min_rounds"] <= 1.5e7
        assert result["history"] and all({"n", "feasible", "total_l"} <= set(h) for h in result["history"])


class TestSimulate:
    def test_protocol_two(self, capsys):
        code, out, _ = run(capsys, "simulate", "--protocol", "2", "--nu", "0.1", "--gamma", "0.5",
                           "--rounds", "1000000", "--seed", "42")
        assert code == EXIT_OK
        env = json.loads(out)
        assert abs(env["result"]["empirical_omega"] - 0.8182) <= 0.0022
        assert env["config"]["seed"] == 42

    def test_protocol_one(self, capsys):
        _, out, _ = run(capsys, "simulate", "--protocol", "1", "--gamma", "0.5", "--blocks", "100000", "--seed", "7")
        assert json.loads(out)["result"]["mean_block_length"] == pytest.approx(1.5, abs=0.01)


class TestExperiments:
    def test_csv_rows(self, capsys):
        code, out, _ = run(capsys, "experiments", "--attack", "collective-aep", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "name,platform,attack,corner,beta,q,asymptotic_rate,verdict,min_rounds"
        assert len(lines) == 10


class TestRegion:
    def test_header_golden(self, capsys):
        code, out, _ = run(capsys, *REGION)
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "qber,beta,asymptotic_rate,min_rounds,feasible_at_1000000,feasible_at_100000000"
        assert len(lines) == 10

    def test_nesting_column_wise(self, capsys):
        _, out, _ = run(capsys, *REGION)
        for line in out.splitlines()[1:]:
            small, large = line.split(",")[-2:]
            if small == "true":
                assert large == "true"

    def test_out_receipt(self, capsys, tmp_path):
        path = tmp_path / "scan.csv"
        code, out, _ = run(capsys, *REGION, "--out", str(path))
        assert code == EXIT_OK
        receipt = json.loads(out)["result"]
        data = path.read_bytes()
        assert receipt["rows"] == 9
        assert receipt["sha256"] == hashlib.sha256(data).hexdigest()


class TestReplay:
    @pytest.mark.parametrize(
        "argv",
        [
            ["rate", "--attack", "coherent", "--beta", "2.47", "--qber", "0.051", "--rounds", "3e8"],
            ["rate", "--attack", "collective-h2", "--nu", "0.01", "--rounds", "1e7", "--gamma", "0.01"],
            ["min-rounds", "--attack", "collective-aep", "--beta", "2.6", "--qber", "0.02"],
            ["simulate", "--protocol", "1", "--gamma", "0.2", "--blocks", "1000", "--seed", "5", "--trials", "3"],
            ["experiments", "--attack", "collective-h2", "--pessimistic"],
            ["verify-h2", "--grid-points", "4"],
        ],
    )
    def test_envelope_replays_byte_identically(self, capsys, tmp_path, argv):
        first = tmp_path / "first.json"
        code = main(argv + ["--out", str(first)])
        capsys.readouterr()
        second = tmp_path / "second.json"
        env = json.loads(first.read_text())
        # the echo includes --out, so the replay names its own file and that path is the only difference
        assert main([env["command"], "--config", str(first), "--out", str(second)]) == code
        capsys.readouterr()
        assert second.read_bytes() == first.read_bytes().replace(str(first).encode(), str(second).encode())

    def test_repeat_is_byte_identical(self, capsys):
        outs = [run(capsys, *REGION)[1] for _ in range(2)]
        assert outs[0] == outs[1]

    def test_key_value_config_and_flag_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("attack = collective-aep\nbeta = 2.6\nqber = 0.01\nrounds = 1e7\n")
        _, from_file, _ = run(capsys, "rate", "--config", str(cfg))
        _, from_flags, _ = run(capsys, "rate", "--attack", "collective-aep", "--beta", "2.6", "--qber", "0.01",
                               "--rounds", "1e7")
        assert json.loads(from_file)["result"] == json.loads(from_flags)["result"]
        # a point on the command line replaces the point from the file
        _, override, _ = run(capsys, "rate", "--config", str(cfg), "--nu", "0.05")
        env = json.loads(override)
        assert env["config"]["beta"] is None and env["config"]["nu"] == 0.05


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "diqkd.cli", "verify-h2", "--grid-points", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["command"] == "verify-h2"
