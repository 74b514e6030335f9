import json
import re
import subprocess
import sys

import pytest

from boolprop.bench import ExperimentReport
from boolprop.boolfn import BooleanFunction, builtin, gen_random, hamming_distance
from boolprop.cli import main, parse_epsilon
from boolprop.verdict import Verdict

ERROR_LINE = re.compile(r"^boolprop: error: [a-z]+: \S.*\n$")


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def assert_error(err, kind):
    assert ERROR_LINE.match(err), err
    assert err.startswith(f"boolprop: error: {kind}:")


class TestIdentity:
    def test_identical_builtins(self, capsys):
        status, out, _ = run(capsys, "identity", "--f", "parity", "--g", "parity",
                             "--eps", "0.0625", "--seed", "7")
        assert status == 0
        assert "decision: identical" in out
        assert "quantum_queries: 6" in out        # 4m + 2 with m = 1

    def test_json_round_trips(self, capsys):
        status, out, _ = run(capsys, "identity", "--f", "dist:g=rand:n=8,d=16",
                             "--g", "rand:n=8", "--eps", "1/16", "--format", "json")
        assert status == 0
        v = Verdict.from_dict(json.loads(out))
        assert v.algorithm == "quantum_identity"
        assert v.quantum_queries == sum(4 * m + 2 for m in v.plan["rounds"])

    def test_classical(self, capsys):
        status, out, _ = run(capsys, "identity", "--f", "and3", "--g", "and3",
                             "--eps", "1/4", "--classical", "--format", "csv")
        assert status == 0
        header, row = out.strip().splitlines()
        assert row.startswith("classical_identity,identical,0,10,")

    def test_dump_amplitudes(self, capsys):
        status, out, err = run(capsys, "identity", "--f", "parity2", "--g", "const02",
                               "--eps", "1/4", "--dump-amplitudes")
        assert status == 0
        lines = err.splitlines()
        assert len(lines) == 4
        assert all(len(line.split()) == 3 for line in lines)

    def test_same_seed_same_output(self, capsys):
        args = ("identity", "--f", "rand:n=6", "--g", "rand:n=6", "--eps", "1/64", "--seed", "3")
        assert run(capsys, *args) == run(capsys, *args)


class TestCorrelationAndBalance:
    def test_correlation_exact(self, capsys):
        status, out, _ = run(capsys, "correlation", "--f", "bias:n=6,c=1/4,sign=-",
                             "--g", "const0", "--eps", "1/4")
        assert status == 0
        assert "decision: corr_eps" in out and "quantum_queries: 6" in out

    def test_correlation_deterministic(self, capsys):
        status, out, _ = run(capsys, "correlation", "--f", "parity4", "--g", "parity4",
                             "--eps", "0.5", "--classical")
        assert status == 0
        assert "classical_queries: 26" in out

    def test_balance(self, capsys):
        status, out, _ = run(capsys, "balance", "--f", "parity", "--n", "6", "--eps", "1/8")
        assert status == 0
        assert "decision: balanced" in out and "quantum_queries: 14" in out

    def test_balance_classical(self, capsys):
        status, out, _ = run(capsys, "balance", "--f", "const1", "--eps", "0.2", "--classical")
        assert status == 0
        assert "decision: eps_far_balanced" in out and "classical_queries: 625" in out


class TestWalshAndGen:
    def test_and2(self, capsys):
        status, out, _ = run(capsys, "walsh", "--f", "and2")
        assert status == 0
        assert out == "0 0.5\n1 0.5\n2 0.5\n3 -0.5\n"

    def test_and_with_n(self, capsys):
        _, out, _ = run(capsys, "walsh", "--f", "and", "--n", "2", "--format", "csv",
                        "--method", "naive")
        assert out.splitlines()[1:] == ["0,0.5", "1,0.5", "2,0.5", "3,-0.5"]

    def test_json(self, capsys):
        _, out, _ = run(capsys, "walsh", "--f", "parity3", "--format", "json")
        assert json.loads(out) == {"n": 3, "coefficients": [0.0] * 7 + [1.0]}

    def test_gen_and_file_input(self, capsys, tmp_path):
        path = tmp_path / "g.tt"
        status, _, _ = run(capsys, "gen", "--f", "dist:g=parity5,d=3", "--out", str(path))
        assert status == 0
        g = BooleanFunction.from_text(path.read_text())
        assert hamming_distance(g, builtin("parity", 5)) == 3
        status, out, _ = run(capsys, "identity", "--f", str(path), "--g", "parity",
                             "--eps", "3/32")
        assert status == 0 and "quantum_queries" in out

    def test_gen_seeded(self, capsys):
        a = run(capsys, "gen", "--f", "rand:n=7", "--seed", "5")
        b = run(capsys, "gen", "--f", "rand:n=7", "--seed", "5")
        assert a == b


class TestBench:
    ARGS = ("bench", "--problem", "balance", "--n", "12", "--eps", "1/8,1/16,1/32",
            "--trials", "2000", "--seed", "1", "--format", "csv")

    def test_byte_identical(self, capsys):
        first = run(capsys, *self.ARGS)
        second = run(capsys, *self.ARGS)
        assert first[0] == 0
        assert first == second

    def test_json(self, capsys):
        status, out, _ = run(capsys, "bench", "--problem", "identity", "--n", "8",
                             "--eps", "1/8,1/16,1/32", "--trials", "20", "--format", "json")
        assert status == 0
        report = ExperimentReport.from_json(out)
        assert report.to_json() == out

    def test_not_representable(self, capsys):
        status, _, err = run(capsys, "bench", "--problem", "identity", "--n", "6",
                             "--eps", "1/3")
        assert status == 3
        assert_error(err, "representability")
        assert "21/64" in err


class TestErrors:
    def test_missing_file(self, capsys):
        status, _, err = run(capsys, "balance", "--f", "no/such/file", "--eps", "1/8")
        assert status == 2
        assert_error(err, "io")

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.tt"
        bad.write_text("3\nzz\n")
        status, _, err = run(capsys, "walsh", "--f", str(bad))
        assert status == 2
        assert_error(err, "format")

    def test_arity_mismatch(self, capsys):
        status, _, err = run(capsys, "identity", "--f", "parity3", "--g", "parity4",
                             "--eps", "1/8")
        assert status == 2
        assert_error(err, "arity")

    def test_bias_not_representable(self, capsys):
        status, _, err = run(capsys, "balance", "--f", "bias:n=6,c=1/3,sign=+", "--eps", "1/8")
        assert status == 3
        assert_error(err, "representability")

    def test_distance_out_of_range(self, capsys):
        status, _, err = run(capsys, "gen", "--f", "dist:g=parity3,d=9")
        assert status == 3

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["identity", "--f", "parity", "--g", "parity"],
        ["identity", "--f", "parity", "--eps", "1/8"],
        ["balance", "--f", "parity", "--eps", "abc"],
        ["balance", "--f", "parity", "--eps", "1/8", "--mode", "magic"],
        ["balance", "--f", "rand:k=3", "--eps", "1/8"],
        ["balance", "--f", "parity", "--eps", "3/4"],
    ])
    def test_usage(self, capsys, argv):
        status, _, err = run(capsys, *argv)
        assert status == 2
        assert ERROR_LINE.match(err), err

    def test_parse_epsilon(self):
        assert parse_epsilon("0.0625") == parse_epsilon("1/16")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "boolprop", "walsh", "--f", "and2", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "3,-0.5"
    proc = subprocess.run([sys.executable, "-m", "boolprop", "walsh", "--f", "nofile"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2
    assert ERROR_LINE.match(proc.stderr)
