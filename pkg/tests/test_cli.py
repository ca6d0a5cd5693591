import subprocess
import sys

import pytest
from click.testing import CliRunner

from gausskit import textio
from gausskit.circuit import validate
from gausskit.cli import main
from gausskit.gates import GateKind


@pytest.fixture
def runner():
    return CliRunner()


def test_generate_layered_gaussian_validates(runner, tmp_path):
    out = tmp_path / "circuit.txt"
    result = runner.invoke(main, ["generate", "--family", "gaussian",
                                  "--n", "6", "--alpha", "0.9", "--layered",
                                  "--out", str(out)])
    assert result.exit_code == 0
    circuit = textio.load(str(out))
    assert validate(circuit) == []
    assert circuit.ancilla_qubits == 2


def test_generate_phase_line_counts(runner):
    result = runner.invoke(main, ["generate", "--family", "phase", "--n", "5",
                                  "--d", "2", "--alpha", "0.3"])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    z_plain = [l for l in lines if l.startswith("Z ") and "c" not in l]
    z_ctrl = [l for l in lines if l.startswith("Z ") and "c" in l]
    assert len(z_plain) == 5
    assert len(z_ctrl) == 10


def test_generate_gaussian2d_cross_lines(runner):
    result = runner.invoke(main, ["generate", "--family", "gaussian2d",
                                  "--n", "3,3", "--q", "1,1,1",
                                  "--alpha", "0.9"])
    assert result.exit_code == 0
    circuit = textio.loads(result.output)
    x0 = 3
    cross = [g for g in circuit.gates()
             if g.kind is GateKind.B
             and len({q >= x0 for q in (c.qubit for c in g.controls)}) == 2]
    assert cross


def test_generate_usage_error_exit_2(runner):
    result = runner.invoke(main, ["generate", "--family", "phase"])
    assert result.exit_code == 2


def test_simulate_noiseless_gaussian(runner):
    result = runner.invoke(main, ["simulate", "--n", "6", "--alpha", "0.9"])
    assert result.exit_code == 0
    eps_line = [l for l in result.output.splitlines() if "epsilon" in l][0]
    assert float(eps_line.split()[-1]) <= 1e-10


def test_simulate_half_gaussian_file_gamma(runner, tmp_path):
    out = tmp_path / "half.txt"
    runner.invoke(main, ["generate", "--family", "half-gaussian", "--n", "3",
                         "--alpha", "0.8", "--out", str(out)])
    result = runner.invoke(main, ["simulate", str(out), "--family",
                                  "half-gaussian"])
    assert result.exit_code == 0
    gamma = float([l for l in result.output.splitlines()
                   if l.startswith("gamma")][0].split()[-1])
    closed = (sum(0.8 ** (2 * x * x) for x in range(8)) / 8) ** 0.5
    assert gamma == pytest.approx(closed, rel=1e-10)


def test_simulate_parse_error_exit_3(runner, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("QUBITS data=2 ancilla=0 alpha=0.5\nWAT q0\n")
    result = runner.invoke(main, ["simulate", str(bad)])
    assert result.exit_code == 3


def test_simulate_capacity_exit_4(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("GAUSSKIT_MEM_LIMIT_MB", "1")
    result = runner.invoke(main, ["simulate", "--n", "18",
                                  "--alpha", "0.9999999"])
    assert result.exit_code == 4


def test_simulate_deterministic_under_seed(runner):
    args = ["simulate", "--n", "7", "--alpha", "0.95", "--delta", "1e-5",
            "--seed", "9"]
    out1 = runner.invoke(main, args).output
    out2 = runner.invoke(main, args).output
    assert out1 == out2


def test_sweep_csv_deterministic(runner, tmp_path):
    args = ["sweep", "--axis", "delta=1e-5:1e-4:3:log", "--alpha", "0.99",
            "--seed", "5", "--trials", "2"]
    r1 = runner.invoke(main, args)
    r2 = runner.invoke(main, args)
    assert r1.exit_code == 0
    assert r1.output == r2.output
    lines = r1.output.strip().splitlines()
    assert lines[0].startswith("n_qubits,")
    assert len(lines) == 1 + 3 * 2


def test_sweep_threads_do_not_change_results(runner):
    base = ["sweep", "--axis", "delta=1e-5:1e-4:4:log", "--alpha", "0.99",
            "--seed", "3"]
    r1 = runner.invoke(main, base + ["--threads", "1"])
    r4 = runner.invoke(main, base + ["--threads", "4"])
    assert r1.output == r4.output


def test_degenerate_sweep_matches_simulate(runner):
    # threshold(0.99, 1e-5) = 6, so the sweep runs a 6-qubit point
    sweep = runner.invoke(main, ["sweep", "--axis", "delta=1e-5:1e-5:1",
                                 "--alpha", "0.99", "--seed", "0"])
    sim = runner.invoke(main, ["simulate", "--n", "6", "--alpha", "0.99",
                               "--delta", "1e-5", "--seed", "0"])
    row = sweep.output.strip().splitlines()[1].split(",")
    sim_lines = {l.split(":")[0].strip(): l.split()[-1]
                 for l in sim.output.splitlines()}
    assert int(row[0]) == 6
    # the human-readable report prints 7 significant digits
    assert float(row[3]) == pytest.approx(float(sim_lines["epsilon (L2)"]),
                                          rel=1e-5)
    assert float(row[5]) == pytest.approx(
        float(sim_lines["expected T-depth"]), rel=1e-4)


def test_sweep_rejects_three_axes(runner):
    result = runner.invoke(main, ["sweep", "--axis", "delta=1e-5:1e-4:2",
                                  "--axis", "alpha=0.9:0.99:2",
                                  "--axis", "n=4:6:2"])
    assert result.exit_code == 2


def test_sweep_couple_alpha(runner):
    result = runner.invoke(main, ["sweep", "--axis", "delta=1e-4:1e-3:2:log",
                                  "--couple-alpha", "--seed", "1"])
    assert result.exit_code == 0
    rows = result.output.strip().splitlines()[1:]
    assert len(rows) == 2
    # alpha column tracks the coupling, so qubit counts vary with delta
    ns = [int(r.split(",")[0]) for r in rows]
    assert ns == sorted(ns, reverse=True)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gausskit.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "generate" in proc.stdout
