import json

import pytest

from bhtlab.cli import main
from bhtlab.distributions import Distribution


@pytest.fixture
def pair_files(tmp_path):
    p = tmp_path / "p.json"
    q = tmp_path / "q.json"
    p.write_text(Distribution.bernoulli(0.0).to_json())
    q.write_text(Distribution.bernoulli(0.1).to_json())
    return str(p), str(q)


@pytest.fixture
def wide_pair_files(tmp_path):
    p = tmp_path / "p3.json"
    q = tmp_path / "q3.csv"
    p.write_text(Distribution.from_probs([0.5, 0.3, 0.2]).to_json())
    q.write_text(Distribution.from_probs([0.2, 0.3, 0.5]).to_csv())
    return str(p), str(q)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestVerbs:
    def test_divergence_json(self, capsys, pair_files):
        p, q = pair_files
        code, out, _ = run(capsys, ["divergence", "--p", p, "--q", q, "--all"])
        assert code == 0
        payload = json.loads(out)
        assert set(payload) >= {"tv", "hellinger_sq", "kl_pq", "h_lambda", "js_alpha", "e_gamma"}

    def test_exact_n_with_trace(self, capsys, pair_files):
        p, q = pair_files
        code, out, _ = run(
            capsys,
            ["exact-n", "--p", p, "--q", q, "--alpha", "0.25", "--delta", "0.05"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n_star"] == 26
        assert payload["trace"]

    def test_estimate_n(self, capsys, wide_pair_files):
        p, q = wide_pair_files
        code, out, _ = run(
            capsys,
            ["estimate-n", "--p", p, "--q", q, "--alpha", "0.1", "--delta", "0.0125"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["lower"] <= payload["point"] <= payload["upper"]
        assert payload["regime"] == "linear"

    def test_verify_inequality_exit_zero(self, capsys):
        code, out, _ = run(
            capsys, ["verify-inequality", "--grid", "50", "--corner-points", "6"]
        )
        assert code == 0
        assert json.loads(out)["max_violation"] <= 1e-12

    def test_reduce(self, capsys):
        code, out, _ = run(
            capsys,
            ["reduce", "--alpha", "0.2", "--delta", "0.002", "--tau", "0.1", "--T", "64"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["plan"]["T"] == 2
        assert payload["boost"]["bound"] == pytest.approx(0.01)

    def test_quantize_and_ldp(self, capsys, wide_pair_files):
        p, q = wide_pair_files
        code, out, _ = run(capsys, ["quantize", "--p", p, "--q", q, "--levels", "2"])
        assert code == 0
        rows = json.loads(out)["rows"]
        assert all(sum(r) == pytest.approx(1.0) for r in rows)
        code, out, _ = run(
            capsys, ["ldp", "--p", p, "--q", q, "--epsilon", "1.0"]
        )
        assert code == 0
        assert json.loads(out)["epsilon_ldp"] == 1.0

    def test_robust_lfd(self, capsys, wide_pair_files):
        p, q = wide_pair_files
        code, out, _ = run(
            capsys, ["robust-lfd", "--p", p, "--q", q, "--epsilon", "0.05"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["tv_p"] == pytest.approx(0.05, abs=1e-10)

    def test_simulate_deterministic(self, capsys, wide_pair_files):
        p, q = wide_pair_files
        argv = [
            "simulate", "--p", p, "--q", q, "--alpha", "0.3", "--n", "4",
            "--trials", "2000", "--seed", "7",
        ]
        code, out1, _ = run(capsys, argv)
        assert code == 0
        _, out2, _ = run(capsys, argv)
        assert out1 == out2

    def test_sweep_csv_ordering(self, capsys, pair_files):
        p, q = pair_files
        code, out, _ = run(
            capsys,
            [
                "sweep", "--format", "csv", "--p", p, "--q", q,
                "--kind", "error-vs-n", "--alpha", "0.25", "--n-max", "4",
            ],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "bayes_error,n"
        assert len(lines) == 6

    def test_sweep_gamma_kind(self, capsys, pair_files):
        p, q = pair_files
        code, out, _ = run(
            capsys,
            [
                "sweep", "--p", p, "--q", q, "--kind", "nstar-vs-gamma",
                "--alpha", "0.25", "--gamma-grid", "0.5,0.25",
            ],
        )
        assert code == 0
        rows = json.loads(out)
        assert [r["gamma"] for r in rows] == [0.5, 0.25]


class TestErrorChannels:
    def test_domain_error_exit_two(self, capsys, pair_files):
        p, q = pair_files
        code, _, err = run(
            capsys,
            ["exact-n", "--p", p, "--q", q, "--alpha", "5.0", "--delta", "0.1"],
        )
        assert code == 2
        assert json.loads(err)["error"]["type"] == "DomainError"

    def test_capacity_error_exit_three(self, capsys, tmp_path):
        p = tmp_path / "p.json"
        q = tmp_path / "q.json"
        p.write_text(Distribution.from_probs([0.2] * 5).to_json())
        q.write_text(Distribution.from_probs([0.2] * 5).to_json())
        code, _, err = run(
            capsys, ["ldp", "--p", str(p), "--q", str(q), "--epsilon", "1.0"]
        )
        assert code == 3
        assert json.loads(err)["error"]["type"] == "CapacityError"

    def test_unknown_flag_rejected(self, pair_files):
        p, q = pair_files
        with pytest.raises(SystemExit):
            main(["divergence", "--p", p, "--q", q, "--bogus"])

    def test_byte_reproducible_output(self, capsys, wide_pair_files):
        p, q = wide_pair_files
        argv = ["estimate-n", "--p", p, "--q", q, "--alpha", "0.2", "--delta", "0.04"]
        _, out1, _ = run(capsys, argv)
        _, out2, _ = run(capsys, argv)
        assert out1 == out2

    def test_threaded_sweep_keeps_order(self, capsys, pair_files, monkeypatch):
        p, q = pair_files
        argv = [
            "sweep", "--p", p, "--q", q, "--kind", "error-vs-n",
            "--alpha", "0.25", "--n-max", "6",
        ]
        _, serial, _ = run(capsys, argv)
        monkeypatch.setenv("HT_THREADS", "3")
        _, threaded, _ = run(capsys, argv)
        assert serial == threaded


class TestKernelFallback:
    def test_pure_python_env_selects_numpy_backend(self):
        import subprocess
        import sys

        out = subprocess.run(
            [sys.executable, "-c", "import bhtlab; print(bhtlab.KERNEL_BACKEND)"],
            env={"BHTLAB_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
            capture_output=True,
            text=True,
        )
        assert out.stdout.strip() == "numpy"
