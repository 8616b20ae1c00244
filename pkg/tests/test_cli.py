import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from qcamsim.cli import CIRCUITS, main, read_int_sequences
from qcamsim.circuits import Circuit

WORKED_EXAMPLE = Path(__file__).parent / "data" / "worked_example.fa"


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def parse_sweep(text):
    main_part, summary_part = text.strip().split("\n\n")
    return (list(csv.DictReader(io.StringIO(main_part))),
            list(csv.DictReader(io.StringIO(summary_part))))


def test_sweep_exact_variant(capsys):
    rc, out, _ = run_cli(capsys, "heqc-sweep", "--variant", "exact", "--repeats", "2")
    assert rc == 0
    rows, summary = parse_sweep(out)
    assert list(rows[0]) == ["M_true", "trial", "theta_hat", "theta_true", "m_est", "k"]
    assert [int(r["M_true"]) for r in summary] == list(range(1, 9))
    for r in rows:
        assert abs(float(r["theta_hat"]) - float(r["theta_true"])) < 1e-9
        assert abs(float(r["theta_true"]) - 2 * math.asin(math.sqrt(int(r["M_true"]) / 256))) < 1e-15


def test_sweep_squared_m4_within_5_stderr(capsys):
    rc, out, _ = run_cli(capsys, "heqc-sweep", "--planted-m", "4", "--seed", "3")
    assert rc == 0
    _, summary = parse_sweep(out)
    (s,) = summary
    assert int(s["trials"]) == 21
    assert abs(float(s["theta_mean"]) - float(s["theta_true"])) < 5 * float(s["theta_stderr"])


def test_sweep_writes_summary_next_to_out(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    rc, _, _ = run_cli(capsys, "heqc-sweep", "--variant", "exact", "--repeats", "1",
                       "--planted-m", "2", "--out", str(out))
    assert rc == 0
    assert out.read_text().startswith("M_true,trial")
    assert (tmp_path / "sweep.summary.csv").read_text().startswith("M_true,trials")


def test_sweep_rerun_is_byte_identical(capsys):
    argv = ("heqc-sweep", "--planted-m", "3", "--repeats", "3", "--seed", "5")
    assert run_cli(capsys, *argv)[1] == run_cli(capsys, *argv)[1]


def test_qcam_generated(capsys):
    rc, out, _ = run_cli(capsys, "qcam", "--planted-m", "3", "--seed", "2")
    assert rc == 0
    report = json.loads(out)
    assert report["brute_force_pairs"] == 3 and report["sound"] and report["complete"]
    for key in ("k", "shots", "seed", "matches", "rejected", "heqc"):
        assert key in report


def test_qcam_input_file_and_rerun(capsys, tmp_path):
    f = tmp_path / "seq.txt"
    f.write_text("# a then b\n1 2 3\n3, 3, 0, 1, 2\n")
    first = run_cli(capsys, "qcam", "--input", str(f), "--seed", "4")
    second = run_cli(capsys, "qcam", "--input", str(f), "--seed", "4")
    assert first == second and first[0] == 0
    report = json.loads(first[1])
    assert report["a"] == [1, 2, 3] and report["found_pairs"] == 4 == report["brute_force_pairs"]


def test_qcam_fixed_iterations(capsys):
    rc, out, _ = run_cli(capsys, "qcam", "--iterations", "0", "--shots", "50")
    assert rc == 0 and json.loads(out)["k"] == 0


def test_read_int_sequences_errors(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("1 2\n")
    with pytest.raises(ValueError):
        read_int_sequences(f)
    f.write_text("1 x\n2\n")
    with pytest.raises(ValueError):
        read_int_sequences(f)


def test_jaccard_default_equal(capsys):
    rc, out, _ = run_cli(capsys, "jaccard", "--dna-len", "16", "--k", "2", "--seed", "1")
    assert rc == 0
    report = json.loads(out)
    assert report["equal"] is True
    assert report["quantum"]["jaccard"] == report["classical"]["jaccard"]


def test_jaccard_classical_only_on_worked_example(capsys):
    rc, out, _ = run_cli(capsys, "jaccard", "--fasta", str(WORKED_EXAMPLE), "--k", "4",
                         "--classical-only")
    assert rc == 0
    report = json.loads(out)
    # every length-4 window, including the last one (ACCC) shared by both strands
    assert (report["size_a"], report["size_b"], report["size_intersection"]) == (57, 56, 37)
    assert report["jaccard"] == pytest.approx(37 / 76)
    assert "ACCC" in report["kmers_in_intersection"]


def test_export_every_circuit(capsys):
    for name in CIRCUITS:
        rc, out, _ = run_cli(capsys, "export-circuit", "--circuit", name)
        assert rc == 0, name
        circuit = Circuit.from_json(out)
        assert circuit.ops, name
        assert json.loads(out)["registers"]


def test_export_diffuser_counts(capsys):
    rc, out, _ = run_cli(capsys, "export-circuit", "--circuit", "diffuser", "--n-a", "2",
                         "--n-b", "2")
    kinds = [op["kind"] for op in json.loads(out)["ops"]]
    assert kinds == ["H"] * 4 + ["X"] * 4 + ["MCZ"] + ["X"] * 4 + ["H"] * 4 + ["RY"]


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("variant = exact\nrepeats = 1\nplanted-m = 2\nseed = 9  # comment\n")
    rc, out, _ = run_cli(capsys, "heqc-sweep", "--config", str(cfg))
    rows, _ = parse_sweep(out)
    assert rc == 0 and len(rows) == 1 and rows[0]["M_true"] == "2"
    rc, out, _ = run_cli(capsys, "heqc-sweep", "--config", str(cfg), "--planted-m", "5")
    rows, _ = parse_sweep(out)
    assert rows[0]["M_true"] == "5"


@pytest.mark.parametrize("argv", [
    ("heqc-sweep", "--repeats", "0"),
    ("jaccard", "--mutation-rate", "2"),
    ("jaccard", "--fasta", "/nonexistent/file.fa"),
    ("qcam", "--input", "/nonexistent/seq.txt"),
    ("qcam", "--planted-m", "999"),
])
def test_config_errors_exit_1(capsys, argv):
    rc, _, err = run_cli(capsys, *argv)
    assert rc == 1 and err.startswith("error:")


def test_bad_config_key_exit_1(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run_cli(capsys, "selftest", "--config", str(cfg))[0] == 1


def test_capacity_exit_2(capsys):
    rc, _, err = run_cli(capsys, "jaccard", "--dna-len", "64", "--k", "4")
    assert rc == 2 and "capacity" in err
    rc, _, _ = run_cli(capsys, "export-circuit", "--circuit", "qcam", "--max-qubits", "5")
    assert rc == 2


def test_mismatch_exit_3(capsys):
    # a tiny shot budget cannot collect every shared k-mer
    rc, out, _ = run_cli(capsys, "jaccard", "--dna-len", "24", "--k", "2", "--shots", "1",
                         "--seed", "2")
    assert rc == 3 and json.loads(out)["equal"] is False


def test_selftest(capsys):
    rc, out, _ = run_cli(capsys, "selftest")
    assert rc == 0
    assert out.count("PASS") == 4 and "FAIL" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qcamsim.cli", "export-circuit",
                           "--circuit", "oracle", "--depth", "1"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert [op["kind"] for op in json.loads(proc.stdout)["ops"]] == ["CX", "X", "X", "MCZ", "X",
                                                                      "X", "CX"]
